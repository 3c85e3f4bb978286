#pragma once

#include "gvnr/cooc.hpp"
#include "gvnr/dense.hpp"
#include "gvnr/trainer.hpp"
#include "gvnr/types.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gvnr {

/// Lowercases ASCII letters and splits on runs of ASCII characters that are
/// neither letters nor digits. Bytes >= 0x80 stay inside tokens so UTF-8
/// words are not broken apart.
std::vector<std::string> tokenize(std::string_view text);

/// Word <-> dense index. Indices are ordered by descending corpus frequency,
/// ties by byte order of the word.
class Vocabulary {
public:
    std::size_t size() const noexcept { return words_.size(); }
    const std::string& word(WordIndex w) const { return words_.at(w); }
    std::optional<WordIndex> find(std::string_view word) const { return ids_.find(word); }
    /// Occurrences over all documents.
    std::size_t term_frequency(WordIndex w) const { return term_frequency_.at(w); }
    /// Documents containing the word.
    std::size_t doc_frequency(WordIndex w) const { return doc_frequency_.at(w); }
    std::size_t min_count() const noexcept { return min_count_; }
    const std::vector<std::string>& words() const noexcept { return words_; }

private:
    friend struct VocabBuilder;

    std::vector<std::string> words_;
    IdMap ids_;
    std::vector<std::size_t> term_frequency_;
    std::vector<std::size_t> doc_frequency_;
    std::size_t min_count_ = 1;
};

/// Sparse word counts of one document, sorted by word index.
struct BagOfWords {
    std::vector<WordIndex> words;
    std::vector<std::uint32_t> counts;
    std::uint64_t total = 0;

    bool empty() const noexcept { return total == 0; }
};

struct DocCorpus {
    std::vector<BagOfWords> bags;  // one per node
    /// Nodes whose bag is empty after the frequency cutoff.
    std::vector<NodeIndex> empty_nodes;
};

struct TextData {
    Vocabulary vocabulary;
    DocCorpus docs;
};

/// Tokenizes one document per node and keeps words seen at least `min_count`
/// times over the corpus. Throws DomainError when no word survives.
TextData build_vocab(std::span<const std::string> documents, std::size_t min_count);

/// Bag over an existing vocabulary (used to re-derive documents for a
/// persisted word matrix); unknown tokens are skipped.
BagOfWords bag_from_text(std::string_view text, const Vocabulary& vocabulary);

/// Vocabulary whose indices follow the given word order; frequencies are
/// unknown and reported as 0. Used with persisted word matrices.
Vocabulary vocabulary_from_words(const std::vector<std::string>& words);

/// "id<TAB>text" lines; repeated ids are concatenated with a space. Returns
/// one string per node of `ids` (empty when absent). Unknown ids are counted
/// in `unknown` when given.
std::vector<std::string> read_documents(std::istream& in, const IdMap& ids, const std::string& source_name = "<docs>",
                                        std::size_t* unknown = nullptr);

/// (delta_j W) / |delta_j|_1. Throws DomainError on an empty bag.
void doc_context_vector(const BagOfWords& bag, const DenseMatrix& words, std::span<double> out);
std::vector<double> doc_context_vector(const BagOfWords& bag, const DenseMatrix& words);

/// Node vectors U, word vectors W, biases, and free context vectors used only
/// for nodes whose document is empty.
struct TextEmbeddingModel {
    DenseMatrix target;
    DenseMatrix words;
    DenseMatrix fallback_context;
    std::vector<double> target_bias;
    std::vector<double> context_bias;
    IdMap ids;
    TextData text;

    std::size_t dim() const noexcept { return target.cols(); }
    std::size_t node_count() const noexcept { return target.rows(); }

    /// Context vector of node j as the trainer uses it: the document average,
    /// or the free vector when the document is empty.
    void context_vector(NodeIndex j, std::span<double> out) const;
};

struct TextTrainResult {
    TextEmbeddingModel model;
    std::vector<EpochStats> history;
};

/// u_i . ctx_j + b^U_i + b^V_j - log(c + x_ij).
double text_pair_residual(const TextEmbeddingModel& model, NodeIndex i, NodeIndex j, double x, double c);

/// Gradient of r^2 for one cell of the text objective.
struct TextCellGradient {
    double residual = 0.0;
    std::vector<double> target;                   // 2r ctx_j
    std::vector<WordIndex> words;                 // words of delta_j
    std::vector<std::vector<double>> word_grads;  // 2r (count_w / |delta_j|_1) u_i
    std::vector<double> fallback_context;         // 2r u_i, only for empty documents
    double target_bias = 0.0;
    double context_bias = 0.0;
};
TextCellGradient text_cell_gradient(const TextEmbeddingModel& model, NodeIndex i, NodeIndex j, double x, double c);

/// Same selection and optimizer as train(), with v_j replaced by the
/// document average. Word vectors of words outside every selected cell are
/// left untouched.
TextTrainResult train_text(const CoocMatrix& x, const IdMap& ids, const TextData& text, const TrainConfig& cfg,
                           const TrainObserver& observer = {});

/// Content representation of node j. Throws DomainError for an empty document.
std::vector<double> document_representation(const TextEmbeddingModel& model, NodeIndex j);

}  // namespace gvnr
