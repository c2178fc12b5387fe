#include "tempo/runtime/transport.hpp"

#include "tempo/errors.hpp"

namespace tempo::runtime {

Transport::Transport(int n_ranks, std::chrono::milliseconds timeout) : timeout_(timeout) {
    if (n_ranks < 1) throw ConfigError("transport: need at least one rank");
    boxes_.reserve(static_cast<std::size_t>(n_ranks));
    for (int i = 0; i < n_ranks; ++i) boxes_.push_back(std::make_unique<Mailbox>());
}

void Transport::send(int from, int to, int tag, std::vector<double> data) {
    if (to < 0 || to >= n_ranks() || from < 0 || from >= n_ranks()) {
        throw RuntimeFault(from, "send to invalid rank " + std::to_string(to));
    }
    if (drop_ && drop_(from, to, tag)) return;
    Mailbox& box = *boxes_[static_cast<std::size_t>(to)];
    {
        std::lock_guard<std::mutex> lock(box.mutex);
        box.queue.push_back(Message{from, tag, std::move(data)});
    }
    box.cv.notify_all();
}

std::vector<double> Transport::recv(int to, int from, int tag) {
    Mailbox& box = *boxes_[static_cast<std::size_t>(to)];
    std::unique_lock<std::mutex> lock(box.mutex);
    const auto deadline = std::chrono::steady_clock::now() + timeout_;
    for (;;) {
        if (aborted()) {
            throw RuntimeFault(to, "aborted while waiting for rank " + std::to_string(from) +
                                       " (tag " + std::to_string(tag) + "): " + abort_reason_);
        }
        for (auto it = box.queue.begin(); it != box.queue.end(); ++it) {
            if (it->from == from && it->tag == tag) {
                std::vector<double> data = std::move(it->data);
                box.queue.erase(it);
                return data;
            }
        }
        if (box.cv.wait_until(lock, deadline) == std::cv_status::timeout) {
            throw RuntimeFault(to, "timed out waiting for message from rank " +
                                       std::to_string(from) + " (tag " +
                                       std::to_string(tag) + ")");
        }
    }
}

void Transport::abort(const std::string& reason) {
    {
        std::lock_guard<std::mutex> lock(abort_mutex_);
        if (aborted_.load(std::memory_order_relaxed)) return;
        abort_reason_ = reason;
        aborted_.store(true, std::memory_order_release);
    }
    for (auto& box : boxes_) {
        std::lock_guard<std::mutex> lock(box->mutex);
        box->cv.notify_all();
    }
}

void Transport::set_drop_filter(std::function<bool(int, int, int)> filter) {
    drop_ = std::move(filter);
}

} // namespace tempo::runtime
