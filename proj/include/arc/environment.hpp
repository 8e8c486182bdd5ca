#pragma once

#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "arc/core.hpp"

namespace arc {

struct CorpusDocument {
    std::string doc_id;
    std::string title;
    std::string body;
};

struct SearchResult {
    std::string doc_id;
    std::string title;
    std::string snippet;  // first 40 tokens of the body
    double score = 0.0;
};

// Tool surface shared by the offline simulator and the live web client.
// Tool failures surface as observations, never exceptions; the episode
// loop must keep running through bad tool outcomes.
class ToolEnvironment {
public:
    virtual ~ToolEnvironment() = default;
    virtual std::vector<SearchResult> search(const std::string& query, int top_k) = 0;
    virtual Observation visit(const std::string& doc_id, int cap_tokens) = 0;
};

// TF-IDF index over lowercased alphanumeric terms of title+body, title
// terms weighted x2. Immutable after construction; safe for concurrent
// reads.
class SearchIndex {
public:
    static SearchIndex build(std::vector<CorpusDocument> corpus);
    static SearchIndex build_from_jsonl_file(const std::string& path);

    std::vector<SearchResult> search(const std::string& query, int top_k = 5) const;
    Observation visit(const std::string& doc_id, int cap_tokens) const;

    size_t size() const { return docs_.size(); }

private:
    std::vector<CorpusDocument> docs_;
    std::vector<std::unordered_map<std::string, double>> weights_;  // normalized tf-idf per doc
    std::unordered_map<std::string, int> df_;
    std::unordered_map<std::string, size_t> by_id_;
};

class OfflineEnvironment : public ToolEnvironment {
public:
    explicit OfflineEnvironment(std::shared_ptr<const SearchIndex> index)
        : index_(std::move(index)) {}

    std::vector<SearchResult> search(const std::string& query, int top_k) override {
        return index_->search(query, top_k);
    }
    Observation visit(const std::string& doc_id, int cap_tokens) override {
        return index_->visit(doc_id, cap_tokens);
    }

private:
    std::shared_ptr<const SearchIndex> index_;
};

// Live client behind the same interface: a JSON search API plus a page
// fetcher with tag-stripping text extraction. Excluded from the
// acceptance suite (non-deterministic).
class LiveWebEnvironment : public ToolEnvironment {
public:
    struct Config {
        std::string search_endpoint;  // GET {endpoint}?q=<query>&top_k=<k>, JSON reply
        std::string api_key_env = "ARC_SEARCH_API_KEY";
        int timeout_sec = 30;
    };

    explicit LiveWebEnvironment(Config cfg) : cfg_(std::move(cfg)) {}

    std::vector<SearchResult> search(const std::string& query, int top_k) override;
    Observation visit(const std::string& url, int cap_tokens) override;

private:
    Config cfg_;
};

// Renders search results as an observation, truncated to cap_tokens.
Observation observe_search(const std::vector<SearchResult>& results, int cap_tokens);

std::string extract_text(const std::string& html);

}  // namespace arc
