#include "fairrag/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace fairrag {
namespace {

constexpr std::array<const char*, 6> kColumns = {"category",    "category_number", "doc_id",
                                                 "gender",      "entity_name",     "text"};

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// RFC 4180-ish: quoted fields, doubled quotes, CR/LF/CRLF row ends.
std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool row_has_data = false;
    char c;
    while (in.get(c)) {
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get();
                    field += '"';
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                row_has_data = true;
                break;
            case ',':
                row.push_back(std::move(field));
                field.clear();
                row_has_data = true;
                break;
            case '\r':
                break;
            case '\n':
                if (row_has_data || !field.empty() || !row.empty()) {
                    row.push_back(std::move(field));
                    field.clear();
                    rows.push_back(std::move(row));
                    row.clear();
                    row_has_data = false;
                }
                break;
            default:
                field += c;
                row_has_data = true;
                break;
        }
    }
    if (row_has_data || !field.empty() || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += "\"\"";
        } else {
            out += c;
        }
    }
    out += '"';
    return out;
}

}  // namespace

const char* to_string(GroupLabel group) {
    return group == GroupLabel::Protected ? "protected" : "non_protected";
}

GroupLabel parse_group_label(std::string_view annotation) {
    const std::string g = lower(annotation);
    if (g == "female") {
        return GroupLabel::Protected;
    }
    if (g == "male") {
        return GroupLabel::NonProtected;
    }
    throw UnknownGroupError("unknown group annotation: \"" + std::string(annotation) + "\"");
}

std::string normalize_text(std::string_view text, std::size_t word_limit) {
    std::string out;
    out.reserve(text.size());
    std::size_t words = 0;
    std::size_t i = 0;
    const auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
    while (i < text.size() && words < word_limit) {
        while (i < text.size() && is_space(text[i])) {
            ++i;
        }
        if (i >= text.size()) {
            break;
        }
        if (!out.empty()) {
            out += ' ';
        }
        while (i < text.size() && !is_space(text[i])) {
            out += text[i++];
        }
        ++words;
    }
    return out;
}

Corpus Corpus::from_documents(std::vector<Document> documents) {
    if (documents.empty()) {
        throw EmptyCorpusError("corpus has no documents");
    }
    std::set<std::string> seen;
    for (const auto& doc : documents) {
        if (!seen.insert(doc.doc_id).second) {
            throw DuplicateDocIdError("duplicate doc_id: " + doc.doc_id);
        }
    }
    Corpus corpus;
    corpus.documents_ = std::move(documents);
    for (const auto& doc : corpus.documents_) {
        const auto g = static_cast<std::size_t>(doc.group == GroupLabel::NonProtected);
        auto [it, inserted] = corpus.topic_pools_.try_emplace(doc.topic_id);
        if (inserted) {
            corpus.topic_order_.push_back(doc.topic_id);
        }
        it->second[g].push_back(&doc);
        corpus.global_pools_[g].push_back(&doc);
        corpus.all_.push_back(&doc);
    }
    return corpus;
}

const std::vector<const Document*>& Corpus::pool_for(const std::string& topic_id,
                                                     GroupLabel group) const {
    const auto it = topic_pools_.find(topic_id);
    if (it == topic_pools_.end()) {
        throw UnknownTopicError("unknown topic: " + topic_id);
    }
    return it->second[static_cast<std::size_t>(group == GroupLabel::NonProtected)];
}

const std::vector<const Document*>& Corpus::global_pool(GroupLabel group) const {
    return global_pools_[static_cast<std::size_t>(group == GroupLabel::NonProtected)];
}

Corpus load_corpus(const std::filesystem::path& csv_path, std::size_t truncation_limit,
                   const std::optional<std::filesystem::path>& overrides_dir) {
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) {
        throw CorpusError("cannot open corpus file: " + csv_path.string());
    }
    const auto rows = parse_csv(in);
    if (rows.empty()) {
        throw EmptyCorpusError("corpus file is empty: " + csv_path.string());
    }

    const auto& header = rows.front();
    for (std::size_t i = 0; i < kColumns.size(); ++i) {
        if (i >= header.size() || lower(header[i]) != kColumns[i]) {
            throw MissingColumnError("header row: expected column " + std::to_string(i + 1) +
                                     " to be \"" + kColumns[i] + "\"");
        }
    }
    if (header.size() != kColumns.size()) {
        throw CorpusError("header row: expected 6 columns, got " +
                          std::to_string(header.size()));
    }

    std::vector<Document> documents;
    documents.reserve(rows.size() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const std::string where = "row " + std::to_string(r + 1);
        if (row.size() < kColumns.size()) {
            throw MissingColumnError(where + ": missing column \"" + kColumns[row.size()] +
                                     "\"");
        }
        if (row.size() > kColumns.size()) {
            throw CorpusError(where + ": expected 6 columns, got " +
                              std::to_string(row.size()));
        }
        Document doc;
        doc.topic_id = row[0];
        try {
            doc.topic_number = std::stoi(row[1]);
        } catch (const std::exception&) {
            throw CorpusError(where + ": category_number is not an integer: \"" + row[1] +
                              "\"");
        }
        doc.doc_id = row[2];
        try {
            doc.group = parse_group_label(row[3]);
        } catch (const UnknownGroupError& e) {
            throw UnknownGroupError(where + ": " + e.what());
        }
        doc.title = row[4];
        if (doc.title.empty()) {
            throw CorpusError(where + ": entity_name is empty");
        }
        std::string text = row[5];
        if (overrides_dir) {
            const auto override_path = *overrides_dir / (doc.doc_id + ".txt");
            std::ifstream override_in(override_path, std::ios::binary);
            if (override_in) {
                std::ostringstream buf;
                buf << override_in.rdbuf();
                text = buf.str();
            }
        }
        doc.text = normalize_text(text, truncation_limit);
        documents.push_back(std::move(doc));
    }
    return Corpus::from_documents(std::move(documents));
}

void write_corpus_csv(const Corpus& corpus, const std::filesystem::path& out_path) {
    const auto tmp = out_path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw CorpusError("cannot write: " + out_path.string());
        }
        out << "category,category_number,doc_id,gender,entity_name,text\n";
        for (const auto& doc : corpus.documents()) {
            out << csv_quote(doc.topic_id) << ',' << doc.topic_number << ','
                << csv_quote(doc.doc_id) << ','
                << (doc.group == GroupLabel::Protected ? "female" : "male") << ','
                << csv_quote(doc.title) << ',' << csv_quote(doc.text) << '\n';
        }
    }
    std::filesystem::rename(tmp, out_path);
}

}  // namespace fairrag
