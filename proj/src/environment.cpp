#include "arc/environment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include "httplib.h"

#include "arc/budget.hpp"
#include "arc/errors.hpp"

namespace arc {

namespace {

std::vector<std::string> tokenize_terms(const std::string& text) {
    std::vector<std::string> terms;
    std::string cur;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else if (!cur.empty()) {
            terms.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) terms.push_back(std::move(cur));
    return terms;
}

Observation make_observation(std::string content, std::string source, int cap_tokens) {
    bool truncated = false;
    std::string capped = truncate_to_tokens(content, cap_tokens, &truncated);
    Observation obs;
    obs.content = std::move(capped);
    obs.source = std::move(source);
    obs.truncated = truncated;
    obs.token_count = truncated ? cap_tokens : count_tokens(obs.content);
    return obs;
}

}  // namespace

SearchIndex SearchIndex::build(std::vector<CorpusDocument> corpus) {
    SearchIndex index;
    index.docs_ = std::move(corpus);

    for (size_t i = 0; i < index.docs_.size(); ++i) {
        const auto& doc = index.docs_[i];
        if (doc.doc_id.empty() || doc.title.empty() || doc.body.empty())
            throw Error("corpus document with empty field: " + doc.doc_id);
        if (!index.by_id_.emplace(doc.doc_id, i).second)
            throw DuplicateDocId("duplicate doc_id: " + doc.doc_id);
    }

    // term frequencies, title terms counted twice
    std::vector<std::unordered_map<std::string, double>> tf(index.docs_.size());
    for (size_t i = 0; i < index.docs_.size(); ++i) {
        for (const auto& term : tokenize_terms(index.docs_[i].title)) tf[i][term] += 2.0;
        for (const auto& term : tokenize_terms(index.docs_[i].body)) tf[i][term] += 1.0;
        for (const auto& [term, _] : tf[i]) index.df_[term] += 1;
    }

    double n = static_cast<double>(index.docs_.size());
    index.weights_.resize(index.docs_.size());
    for (size_t i = 0; i < index.docs_.size(); ++i) {
        double norm_sq = 0.0;
        for (const auto& [term, freq] : tf[i]) {
            double idf = std::log(1.0 + n / index.df_[term]);
            double w = freq * idf;
            index.weights_[i][term] = w;
            norm_sq += w * w;
        }
        double norm = std::sqrt(norm_sq);
        if (norm > 0)
            for (auto& [term, w] : index.weights_[i]) w /= norm;
    }
    return index;
}

SearchIndex SearchIndex::build_from_jsonl_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus file: " + path);
    std::vector<CorpusDocument> corpus;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            json j = json::parse(line);
            corpus.push_back({j.at("doc_id").get<std::string>(),
                              j.at("title").get<std::string>(),
                              j.at("body").get<std::string>()});
        } catch (const json::exception& e) {
            throw FormatError(lineno, std::string("bad corpus line: ") + e.what());
        }
    }
    if (corpus.empty()) throw Error("empty corpus: " + path);
    return build(std::move(corpus));
}

std::vector<SearchResult> SearchIndex::search(const std::string& query, int top_k) const {
    auto terms = tokenize_terms(query);
    std::unordered_map<std::string, double> qtf;
    for (const auto& term : terms) qtf[term] += 1.0;

    double n = static_cast<double>(docs_.size());
    std::unordered_map<std::string, double> qw;
    double qnorm_sq = 0.0;
    for (const auto& [term, freq] : qtf) {
        auto it = df_.find(term);
        if (it == df_.end()) continue;
        double w = freq * std::log(1.0 + n / it->second);
        qw[term] = w;
        qnorm_sq += w * w;
    }
    if (qw.empty()) return {};
    double qnorm = std::sqrt(qnorm_sq);

    std::vector<SearchResult> results;
    for (size_t i = 0; i < docs_.size(); ++i) {
        double dot = 0.0;
        for (const auto& [term, w] : qw) {
            auto it = weights_[i].find(term);
            if (it != weights_[i].end()) dot += w * it->second;
        }
        if (dot <= 0.0) continue;
        SearchResult r;
        r.doc_id = docs_[i].doc_id;
        r.title = docs_[i].title;
        r.snippet = truncate_to_tokens(docs_[i].body, 40);
        r.score = dot / qnorm;
        results.push_back(std::move(r));
    }
    std::sort(results.begin(), results.end(), [](const SearchResult& a, const SearchResult& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;
    });
    if (static_cast<int>(results.size()) > top_k) results.resize(top_k);
    return results;
}

Observation SearchIndex::visit(const std::string& doc_id, int cap_tokens) const {
    auto it = by_id_.find(doc_id);
    if (it == by_id_.end())
        return make_observation("document not found: " + doc_id, "visit", cap_tokens);
    return make_observation(docs_[it->second].body, "visit", cap_tokens);
}

Observation observe_search(const std::vector<SearchResult>& results, int cap_tokens) {
    if (results.empty()) return make_observation("no results", "search", cap_tokens);
    std::string text;
    for (const auto& r : results)
        text += r.doc_id + " | " + r.title + " | " + r.snippet + "\n";
    return make_observation(std::move(text), "search", cap_tokens);
}

// ── Live web client ────────────────────────────────────────────────────

std::string extract_text(const std::string& html) {
    std::string out;
    bool in_tag = false;
    bool in_script = false;
    size_t i = 0;
    while (i < html.size()) {
        if (html[i] == '<') {
            auto rest = html.substr(i, 9);
            if (rest.rfind("<script", 0) == 0 || rest.rfind("<style", 0) == 0)
                in_script = true;
            if (rest.rfind("</script", 0) == 0 || rest.rfind("</style", 0) == 0)
                in_script = false;
            in_tag = true;
        } else if (html[i] == '>') {
            in_tag = false;
        } else if (!in_tag && !in_script) {
            out += html[i];
        }
        ++i;
    }
    // collapse whitespace runs
    std::string collapsed;
    bool prev_space = false;
    for (char c : out) {
        bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
        if (space && prev_space) continue;
        collapsed += space ? ' ' : c;
        prev_space = space;
    }
    return collapsed;
}

std::vector<SearchResult> LiveWebEnvironment::search(const std::string& query, int top_k) {
    auto pos = cfg_.search_endpoint.find("://");
    size_t path_start =
        cfg_.search_endpoint.find('/', pos == std::string::npos ? 0 : pos + 3);
    std::string host = path_start == std::string::npos
                           ? cfg_.search_endpoint
                           : cfg_.search_endpoint.substr(0, path_start);
    std::string path = path_start == std::string::npos
                           ? "/"
                           : cfg_.search_endpoint.substr(path_start);

    httplib::Client client(host);
    client.set_read_timeout(cfg_.timeout_sec, 0);
    httplib::Headers headers;
    if (const char* key = std::getenv(cfg_.api_key_env.c_str()))
        headers.emplace("Authorization", std::string("Bearer ") + key);

    httplib::Params params{{"q", query}, {"top_k", std::to_string(top_k)}};
    auto res = client.Get(path, params, headers);
    if (!res || res->status != 200) return {};

    std::vector<SearchResult> results;
    try {
        json j = json::parse(res->body);
        for (const auto& item : j.at("results")) {
            SearchResult r;
            r.doc_id = item.value("url", item.value("doc_id", ""));
            r.title = item.value("title", "");
            r.snippet = item.value("snippet", "");
            r.score = item.value("score", 0.0);
            results.push_back(std::move(r));
            if (static_cast<int>(results.size()) >= top_k) break;
        }
    } catch (const json::exception&) {
        return {};
    }
    return results;
}

Observation LiveWebEnvironment::visit(const std::string& url, int cap_tokens) {
    auto pos = url.find("://");
    size_t path_start = url.find('/', pos == std::string::npos ? 0 : pos + 3);
    std::string host = path_start == std::string::npos ? url : url.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(host);
    client.set_read_timeout(cfg_.timeout_sec, 0);
    auto res = client.Get(path);
    if (!res || res->status != 200)
        return make_observation("document not found: " + url, "visit", cap_tokens);
    return make_observation(extract_text(res->body), "visit", cap_tokens);
}

}  // namespace arc
