#include "presuppose/app/runner.hpp"

#include "presuppose/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace presuppose::app {

namespace {

struct Slot {
    bool done = false;
    std::optional<std::string> line;
    std::string error;
};

}  // namespace

std::vector<ItemFailure> run_ordered(std::span<const std::string> ids, int concurrency,
                                     const std::function<std::string(std::size_t)>& compute,
                                     const std::function<void(const std::string&)>& emit)
{
    const std::size_t n = ids.size();
    std::vector<Slot> slots(n);
    std::mutex mutex;
    std::condition_variable ready;
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n)
                return;
            Slot result;
            try {
                result.line = compute(i);
            } catch (const std::exception& e) {
                result.error = e.what();
            }
            result.done = true;
            {
                std::lock_guard lock(mutex);
                slots[i] = std::move(result);
            }
            ready.notify_all();
        }
    };

    const std::size_t workers = std::min<std::size_t>(std::max(concurrency, 1), std::max<std::size_t>(n, 1));
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t)
        threads.emplace_back(worker);

    std::vector<ItemFailure> failures;
    std::exception_ptr emit_error;
    for (std::size_t i = 0; i < n && !emit_error; ++i) {
        Slot slot;
        {
            std::unique_lock lock(mutex);
            ready.wait(lock, [&] { return slots[i].done; });
            slot = std::move(slots[i]);
        }
        if (!slot.line) {
            failures.push_back({ids[i], slot.error});
            continue;
        }
        try {
            emit(*slot.line);
        } catch (...) {
            // no new work; items already started finish before the join
            emit_error = std::current_exception();
            next.store(n);
        }
    }
    for (auto& t : threads)
        t.join();
    if (emit_error)
        std::rethrow_exception(emit_error);
    return failures;
}

std::set<std::string> completed_ids(const std::filesystem::path& output)
{
    std::set<std::string> ids;
    std::ifstream in(output, std::ios::binary);
    if (!in)
        return ids;
    std::ostringstream buf;
    buf << in.rdbuf();
    in.close();
    const std::string text = buf.str();

    std::size_t keep = 0;  // bytes of complete, readable lines
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        if (nl == std::string::npos)
            break;
        const std::string line = text.substr(pos, nl - pos);
        if (line.find_first_not_of(" \t\r") != std::string::npos) {
            try {
                const auto j = nlohmann::json::parse(line);
                ids.insert(j.at("id").get<std::string>());
            } catch (const nlohmann::json::exception& e) {
                throw Error(output.string() + ": unreadable line while resuming: " + e.what());
            }
        }
        pos = nl + 1;
        keep = pos;
    }
    if (keep != text.size())
        std::filesystem::resize_file(output, keep);
    return ids;
}

}  // namespace presuppose::app
