#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ssn/types.hpp"

namespace ssn {

enum class SourceKind { interview, written_text, narrative, other };

const char* to_string(SourceKind k);

struct RawDocument {
  MemberId member_id;
  SourceKind source_kind = SourceKind::other;
  std::string path;  // origin, for diagnostics
  std::string text;  // UTF-8
};

// One sentence after tokenization, stopword removal and stemming.
struct Sentence {
  std::vector<std::string> tokens;
};

struct MemberCorpus {
  MemberId member_id;
  std::vector<Sentence> sentences;
  std::size_t total_word_count = 0;  // tokens before stopword removal
};

enum class StemmerKind { porter_english, none, external_table };

struct PreprocessConfig {
  std::unordered_set<std::string> stopwords;  // matched after case folding, before stemming
  StemmerKind stemmer = StemmerKind::porter_english;
  std::unordered_map<std::string, std::string> stem_table;  // used by external_table
  std::u32string sentence_delimiters = U".!?…";
  bool case_fold = true;
  bool strip_punctuation = true;

  void validate() const;  // delimiter set must be non-empty
};

// One stopword per line; blank lines and lines starting with '#' are skipped.
std::unordered_set<std::string> load_stopwords(const std::filesystem::path& file);

// Two-column "word,stem" CSV for StemmerKind::external_table.
std::unordered_map<std::string, std::string> load_stem_table(const std::filesystem::path& file);

// CSV with header member_id,group_id,position,gender,artistic_education,genre.
std::vector<ActorAttributes> load_manifest(const std::filesystem::path& file);

// Reads every *.txt under root/<member_id>/ for each manifest member.  A
// member without a directory gets an empty document list; a directory under
// root that matches no manifest member is an error.
std::vector<RawDocument> load_corpus(const std::filesystem::path& root,
                                     const std::vector<ActorAttributes>& manifest);

// Sentence segmentation, tokenization, case folding, stopword removal and
// stemming for one document.  word_count receives the pre-filter token count.
std::vector<Sentence> preprocess(const RawDocument& doc, const PreprocessConfig& cfg,
                                 std::size_t* word_count = nullptr);

// Applies preprocess to every document of every manifest member (documents in
// path order) and concatenates per member.  Parallel over documents.
std::vector<MemberCorpus> preprocess_corpus(const std::vector<RawDocument>& docs,
                                            const std::vector<ActorAttributes>& manifest,
                                            const PreprocessConfig& cfg);

std::string apply_stemmer(const std::string& token, const PreprocessConfig& cfg);

}  // namespace ssn
