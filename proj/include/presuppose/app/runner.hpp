#pragma once

#include <filesystem>
#include <functional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace presuppose::app {

struct ItemFailure {
    std::string id;
    std::string message;
};

// Computes items on up to `concurrency` worker threads and hands the results
// to `emit` in input order from the calling thread. An item whose compute
// throws is reported and skipped; the others still run.
std::vector<ItemFailure> run_ordered(std::span<const std::string> ids, int concurrency,
                                     const std::function<std::string(std::size_t)>& compute,
                                     const std::function<void(const std::string&)>& emit);

// Ids already present in a JSONL output file. A trailing line cut short by
// an interrupted run is removed from the file.
std::set<std::string> completed_ids(const std::filesystem::path& output);

}  // namespace presuppose::app
