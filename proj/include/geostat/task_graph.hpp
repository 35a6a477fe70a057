#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <exception>
#include <functional>
#include <initializer_list>
#include <mutex>
#include <thread>
#include <unordered_map>
#include <vector>

namespace geostat {

// Directed acyclic graph of tile-level tasks. Dependencies are derived from
// declared data accesses in submission order (sequential task flow): a task
// waits on the last writer of everything it touches and on all readers of
// everything it writes. Running the graph with any number of workers
// therefore mutates each datum in submission order, which keeps results
// bitwise independent of the worker count.
class TaskGraph {
  public:
    using DataKey = const void*;

    void submit(std::initializer_list<DataKey> reads, std::initializer_list<DataKey> writes,
                std::function<void()> fn) {
        const std::uint32_t id = static_cast<std::uint32_t>(tasks_.size());
        tasks_.push_back(Task{std::move(fn), {}, 0});
        for (DataKey r : reads) {
            auto it = last_writer_.find(r);
            if (it != last_writer_.end()) add_edge(it->second, id);
            readers_[r].push_back(id);
        }
        for (DataKey w : writes) {
            auto it = last_writer_.find(w);
            if (it != last_writer_.end()) add_edge(it->second, id);
            auto rit = readers_.find(w);
            if (rit != readers_.end()) {
                for (std::uint32_t rd : rit->second)
                    if (rd != id) add_edge(rd, id);
                rit->second.clear();
            }
            last_writer_[w] = id;
        }
    }

    std::size_t size() const { return tasks_.size(); }

    // Executes all tasks. n_threads <= 1 runs them inline in submission
    // order (a valid topological order by construction). The first exception
    // cancels the remaining tasks and is rethrown.
    void run(int n_threads) {
        if (tasks_.empty()) return;
        if (n_threads <= 1) {
            for (auto& t : tasks_) t.fn();
            return;
        }
        std::deque<std::uint32_t> ready;
        for (std::uint32_t i = 0; i < tasks_.size(); ++i)
            if (tasks_[i].unmet == 0) ready.push_back(i);

        std::mutex m;
        std::condition_variable cv;
        std::size_t completed = 0;
        std::exception_ptr first_error;
        bool cancelled = false;

        auto worker = [&]() {
            std::unique_lock<std::mutex> lock(m);
            for (;;) {
                cv.wait(lock, [&] { return !ready.empty() || completed == tasks_.size() || cancelled; });
                if (cancelled || completed == tasks_.size()) return;
                const std::uint32_t id = ready.front();
                ready.pop_front();
                lock.unlock();
                std::exception_ptr err;
                try {
                    tasks_[id].fn();
                } catch (...) {
                    err = std::current_exception();
                }
                lock.lock();
                if (err) {
                    if (!first_error) first_error = err;
                    cancelled = true;
                    cv.notify_all();
                    return;
                }
                ++completed;
                for (std::uint32_t s : tasks_[id].succ)
                    if (--tasks_[s].unmet == 0) ready.push_back(s);
                if (completed == tasks_.size() || !ready.empty()) cv.notify_all();
            }
        };

        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(n_threads));
        for (int i = 0; i < n_threads; ++i) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }

  private:
    struct Task {
        std::function<void()> fn;
        std::vector<std::uint32_t> succ;
        std::uint32_t unmet;
    };

    void add_edge(std::uint32_t from, std::uint32_t to) {
        tasks_[from].succ.push_back(to);
        ++tasks_[to].unmet;
    }

    std::vector<Task> tasks_;
    std::unordered_map<DataKey, std::uint32_t> last_writer_;
    std::unordered_map<DataKey, std::vector<std::uint32_t>> readers_;
};

// Execution context: the worker count used for task graphs and data-parallel
// loops. Thread count does not affect numerical results anywhere in the
// library.
struct Executor {
    int threads = 1;

    static Executor sequential() { return Executor{1}; }
    static Executor with_threads(int t) { return Executor{t < 1 ? 1 : t}; }

    void run(TaskGraph& graph) const { graph.run(threads); }

    // Applies fn to each index in [0, count); iterations must be independent
    // (each writes only its own slot).
    void for_each(std::int64_t count, const std::function<void(std::int64_t)>& fn) const {
        if (count <= 0) return;
        if (threads <= 1 || count == 1) {
            for (std::int64_t i = 0; i < count; ++i) fn(i);
            return;
        }
        std::atomic<std::int64_t> next{0};
        std::exception_ptr first_error;
        std::mutex err_mutex;
        auto worker = [&]() {
            for (;;) {
                const std::int64_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                    next.store(count);
                    return;
                }
            }
        };
        const int nw = static_cast<int>(std::min<std::int64_t>(threads, count));
        std::vector<std::thread> workers;
        workers.reserve(static_cast<std::size_t>(nw));
        for (int t = 0; t < nw; ++t) workers.emplace_back(worker);
        for (auto& w : workers) w.join();
        if (first_error) std::rethrow_exception(first_error);
    }
};

}  // namespace geostat
