#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "maskbench/dataset.hpp"
#include "maskbench/error.hpp"

namespace maskbench {

// image id -> fixed-length embedding vector.
struct EmbeddingTable {
    std::map<std::string, std::vector<double>> vectors;

    void validate() const {
        std::size_t dim = 0;
        for (const auto& [id, v] : vectors) {
            if (dim == 0) dim = v.size();
            if (v.size() != dim)
                throw std::invalid_argument("EmbeddingTable: \"" + id + "\" has dimension " +
                                            std::to_string(v.size()) + ", expected " +
                                            std::to_string(dim));
            double norm2 = 0.0;
            for (double x : v) {
                if (!std::isfinite(x))
                    throw std::invalid_argument("EmbeddingTable: non-finite value in \"" + id + "\"");
                norm2 += x * x;
            }
            if (norm2 == 0.0)
                throw std::invalid_argument("EmbeddingTable: zero vector for \"" + id + "\"");
        }
    }
};

inline double cosine_similarity(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size())
        throw std::invalid_argument("cosine_similarity: dimension mismatch " +
                                    std::to_string(u.size()) + " vs " + std::to_string(v.size()));
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0)
        throw std::invalid_argument("cosine_similarity: zero-norm vector");
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

struct ThresholdChoice {
    double threshold = 0.0;
    double accuracy = 0.0;
};

// Exact maximizer of verification accuracy (predict same iff sim >= t) over
// the candidate set {midpoints of consecutive sorted unique similarities}
// plus one sentinel below the minimum and one above the maximum. Ties break
// toward the smallest threshold.
inline ThresholdChoice best_threshold(const std::vector<double>& similarities,
                                      const std::vector<bool>& labels) {
    if (similarities.empty() || similarities.size() != labels.size())
        throw std::invalid_argument("best_threshold: need matching nonempty inputs");

    const std::size_t n = similarities.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return similarities[a] < similarities[b]; });

    const std::size_t total_pos =
        static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));

    // Walking the sorted samples: below the lowest candidate everything is
    // predicted positive. Moving the threshold above sample i flips that
    // prediction to negative, so correct(t) updates by +-1 per sample.
    const double lo = similarities[order.front()];
    const double hi = similarities[order.back()];

    std::size_t correct = total_pos; // threshold below the minimum
    ThresholdChoice best{lo - 1.0, static_cast<double>(correct) / static_cast<double>(n)};

    std::size_t i = 0;
    while (i < n) {
        // consume the whole group of equal similarities
        const double value = similarities[order[i]];
        while (i < n && similarities[order[i]] == value) {
            if (labels[order[i]])
                --correct; // a positive now predicted negative
            else
                ++correct; // a negative now predicted negative
            ++i;
        }
        const double threshold =
            (i < n) ? (value + similarities[order[i]]) / 2.0 : hi + 1.0;
        const double accuracy = static_cast<double>(correct) / static_cast<double>(n);
        if (accuracy > best.accuracy)
            best = {threshold, accuracy};
    }
    return best;
}

struct FoldOutcome {
    int fold = 0;
    double threshold = 0.0;
    double accuracy = 0.0;
};

struct VerificationReport {
    std::vector<FoldOutcome> folds;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;
    std::size_t pair_count = 0;
};

// The unrestricted k-fold protocol: the threshold for each fold is chosen
// on the other folds, accuracy is measured on the held-out fold.
inline VerificationReport kfold_accuracy(const PairList& pairs, const FoldAssignment& folds,
                                         const EmbeddingTable& table, int k = 10) {
    if (pairs.entries.size() != folds.fold_of_pair.size())
        throw std::invalid_argument("kfold_accuracy: fold assignment covers " +
                                    std::to_string(folds.fold_of_pair.size()) + " pairs, expected " +
                                    std::to_string(pairs.entries.size()));
    for (int f : folds.fold_of_pair)
        if (f < 0 || f >= k)
            throw std::invalid_argument("kfold_accuracy: fold index " + std::to_string(f) +
                                        " out of range for k=" + std::to_string(k));

    std::vector<std::string> missing;
    const auto lookup = [&](const std::string& id) -> const std::vector<double>* {
        const auto it = table.vectors.find(id);
        if (it == table.vectors.end()) {
            missing.push_back(id);
            return nullptr;
        }
        return &it->second;
    };

    std::vector<double> sims(pairs.entries.size(), 0.0);
    std::vector<bool> labels(pairs.entries.size(), false);
    for (std::size_t i = 0; i < pairs.entries.size(); ++i) {
        const auto* u = lookup(pairs.entries[i].name_a);
        const auto* v = lookup(pairs.entries[i].name_b);
        if (u && v) sims[i] = cosine_similarity(*u, *v);
        labels[i] = pairs.entries[i].same_identity;
    }
    if (!missing.empty()) {
        std::sort(missing.begin(), missing.end());
        missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
        std::string msg = "kfold_accuracy: missing embeddings for:";
        for (const std::string& id : missing) msg += " " + id;
        throw LoadError(msg);
    }

    VerificationReport report;
    report.pair_count = pairs.entries.size();
    double sum = 0.0;
    for (int f = 0; f < k; ++f) {
        std::vector<double> train_sims, test_sims;
        std::vector<bool> train_labels, test_labels;
        for (std::size_t i = 0; i < sims.size(); ++i) {
            if (folds.fold_of_pair[i] == f) {
                test_sims.push_back(sims[i]);
                test_labels.push_back(labels[i]);
            } else {
                train_sims.push_back(sims[i]);
                train_labels.push_back(labels[i]);
            }
        }
        if (test_sims.empty() || train_sims.empty())
            throw std::invalid_argument("kfold_accuracy: fold " + std::to_string(f) +
                                        " is empty or exhausts the data");
        const ThresholdChoice choice = best_threshold(train_sims, train_labels);
        std::size_t correct = 0;
        for (std::size_t i = 0; i < test_sims.size(); ++i) {
            const bool predicted = test_sims[i] >= choice.threshold;
            if (predicted == test_labels[i]) ++correct;
        }
        const double accuracy = static_cast<double>(correct) / static_cast<double>(test_sims.size());
        report.folds.push_back({f, choice.threshold, accuracy});
        sum += accuracy;
    }
    report.mean_accuracy = sum / static_cast<double>(k);
    double var = 0.0;
    for (const FoldOutcome& fo : report.folds) {
        const double d = fo.accuracy - report.mean_accuracy;
        var += d * d;
    }
    report.std_accuracy = std::sqrt(var / static_cast<double>(k));
    return report;
}

// ---------------------------------------------------------------------------
// Embedding files.
//
// Text format: one record per line, "image-id d v1 ... vd".
// Binary format (.bin): repeated records of
//   u32 id_length | id bytes | u32 dimension | dimension * f32
// all little-endian.

inline EmbeddingTable read_embeddings_text(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw LoadError("cannot open embeddings file: " + path);
    EmbeddingTable table;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string id;
        std::size_t dim;
        if (!(ss >> id >> dim))
            throw LoadError("embeddings " + path + ": malformed line " + std::to_string(line_no));
        std::vector<double> v(dim);
        for (std::size_t i = 0; i < dim; ++i)
            if (!(ss >> v[i]))
                throw LoadError("embeddings " + path + ": line " + std::to_string(line_no) +
                                " declares " + std::to_string(dim) + " values but has fewer");
        table.vectors[id] = std::move(v);
    }
    table.validate();
    return table;
}

inline EmbeddingTable read_embeddings_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw LoadError("cannot open embeddings file: " + path);
    EmbeddingTable table;
    const auto read_u32 = [&](std::uint32_t& value) -> bool {
        unsigned char b[4];
        if (!in.read(reinterpret_cast<char*>(b), 4)) return false;
        value = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
                (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
        return true;
    };
    std::uint32_t id_len;
    while (read_u32(id_len)) {
        std::string id(id_len, '\0');
        if (!in.read(id.data(), id_len))
            throw LoadError("embeddings " + path + ": truncated id");
        std::uint32_t dim;
        if (!read_u32(dim))
            throw LoadError("embeddings " + path + ": truncated record for \"" + id + "\"");
        std::vector<double> v(dim);
        for (std::uint32_t i = 0; i < dim; ++i) {
            std::uint32_t bits;
            if (!read_u32(bits))
                throw LoadError("embeddings " + path + ": truncated vector for \"" + id + "\"");
            float f;
            std::memcpy(&f, &bits, 4);
            v[i] = static_cast<double>(f);
        }
        table.vectors[id] = std::move(v);
    }
    table.validate();
    return table;
}

// Dispatch: ".bin" means the binary layout, everything else is text.
inline EmbeddingTable read_embeddings(const std::string& path) {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".bin") == 0)
        return read_embeddings_binary(path);
    return read_embeddings_text(path);
}

inline nlohmann::json report_to_json(const VerificationReport& report) {
    nlohmann::json folds = nlohmann::json::array();
    for (const FoldOutcome& f : report.folds)
        folds.push_back({{"fold", f.fold}, {"threshold", f.threshold}, {"accuracy", f.accuracy}});
    return {{"folds", std::move(folds)},
            {"mean_accuracy", report.mean_accuracy},
            {"std_accuracy", report.std_accuracy},
            {"pair_count", report.pair_count}};
}

} // namespace maskbench
