#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fairrag {

enum class GroupLabel { Protected, NonProtected };

const char* to_string(GroupLabel group);

struct CorpusError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MissingColumnError : CorpusError {
    using CorpusError::CorpusError;
};
struct UnknownGroupError : CorpusError {
    using CorpusError::CorpusError;
};
struct DuplicateDocIdError : CorpusError {
    using CorpusError::CorpusError;
};
struct EmptyCorpusError : CorpusError {
    using CorpusError::CorpusError;
};
struct UnknownTopicError : CorpusError {
    using CorpusError::CorpusError;
};

/// Maps a gender annotation to a group: "female" -> Protected,
/// "male" -> NonProtected (case-insensitive). Anything else throws
/// UnknownGroupError rather than dropping the row.
GroupLabel parse_group_label(std::string_view annotation);

struct Document {
    std::string doc_id;
    std::string topic_id;
    int topic_number = 0;
    GroupLabel group = GroupLabel::NonProtected;
    std::string title;  // entity name, used for citation matching
    std::string text;
};

/// Collapses whitespace runs to single spaces, trims, and keeps at most
/// `word_limit` whitespace-delimited words. Idempotent.
std::string normalize_text(std::string_view text, std::size_t word_limit);

/// Immutable after construction; safe for concurrent reads.
class Corpus {
  public:
    /// Validates uniqueness and builds topic and global pools.
    /// Pools preserve input order.
    static Corpus from_documents(std::vector<Document> documents);

    const std::vector<Document>& documents() const { return documents_; }

    /// Topic ids in first-seen input order.
    const std::vector<std::string>& topic_ids() const { return topic_order_; }

    bool has_topic(const std::string& topic_id) const {
        return topic_pools_.count(topic_id) != 0;
    }

    /// Throws UnknownTopicError for an unknown topic id.
    const std::vector<const Document*>& pool_for(const std::string& topic_id,
                                                 GroupLabel group) const;

    const std::vector<const Document*>& global_pool(GroupLabel group) const;

    /// Every document, in input order.
    const std::vector<const Document*>& all() const { return all_; }

  private:
    std::vector<Document> documents_;
    std::vector<std::string> topic_order_;
    std::map<std::string, std::array<std::vector<const Document*>, 2>> topic_pools_;
    std::array<std::vector<const Document*>, 2> global_pools_;
    std::vector<const Document*> all_;
};

/// Loads a corpus CSV with mandatory header
/// `category,category_number,doc_id,gender,entity_name,text`.
/// When `overrides_dir` is given, a file named `<doc_id>.txt` replaces the
/// row's text before normalization and truncation.
Corpus load_corpus(const std::filesystem::path& csv_path,
                   std::size_t truncation_limit = 100,
                   const std::optional<std::filesystem::path>& overrides_dir = std::nullopt);

/// Writes the corpus back out in the canonical column order with quoting.
void write_corpus_csv(const Corpus& corpus, const std::filesystem::path& out_path);

}  // namespace fairrag
