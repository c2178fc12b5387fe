#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace tempo::runtime {

/// In-process message fabric between simulated ranks: ordered point-to-point
/// queues with blocking receive. A receive that outlives the timeout, or any
/// abort, surfaces as a RuntimeFault carrying the waiting rank. Tests can
/// install a drop filter to exercise the fault path.
class Transport {
public:
    explicit Transport(int n_ranks,
                       std::chrono::milliseconds timeout = std::chrono::milliseconds(30000));

    int n_ranks() const { return static_cast<int>(boxes_.size()); }

    /// Non-blocking; messages between a fixed (from, to, tag) triple stay in
    /// send order.
    void send(int from, int to, int tag, std::vector<double> data);

    /// Blocks until a message with the given origin and tag arrives.
    std::vector<double> recv(int to, int from, int tag);

    /// Releases every waiting receiver with a fault.
    void abort(const std::string& reason);

    bool aborted() const { return aborted_.load(std::memory_order_acquire); }

    /// Drop predicate (from, to, tag) -> true to discard the message.
    /// Install before workers start.
    void set_drop_filter(std::function<bool(int, int, int)> filter);

private:
    struct Message {
        int from;
        int tag;
        std::vector<double> data;
    };

    struct Mailbox {
        std::mutex mutex;
        std::condition_variable cv;
        std::deque<Message> queue;
    };

    std::vector<std::unique_ptr<Mailbox>> boxes_;
    std::chrono::milliseconds timeout_;
    std::function<bool(int, int, int)> drop_;
    std::mutex abort_mutex_;
    std::string abort_reason_;  // written once before aborted_ is raised
    std::atomic<bool> aborted_{false};
};

} // namespace tempo::runtime
