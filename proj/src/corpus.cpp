#include "ssn/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "ssn/stemmer.hpp"

namespace fs = std::filesystem;

namespace ssn {
namespace {

// Decodes the UTF-8 sequence starting at i, advances i, throws ParseError
// (with byte offset) on malformed input.  `where` names the source.
char32_t next_codepoint(const std::string& s, std::size_t& i, const std::string& where) {
  const auto fail = [&](std::size_t at) -> char32_t {
    throw ParseError(where + ": invalid UTF-8 at byte " + std::to_string(at));
  };
  const auto byte = [&](std::size_t at) { return static_cast<unsigned char>(s[at]); };
  const std::size_t start = i;
  const unsigned char b0 = byte(i++);
  if (b0 < 0x80) return b0;
  int extra;
  char32_t cp;
  if ((b0 & 0xE0) == 0xC0) {
    extra = 1;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    extra = 2;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    extra = 3;
    cp = b0 & 0x07;
  } else {
    return fail(start);
  }
  for (int n = 0; n < extra; ++n) {
    if (i >= s.size() || (byte(i) & 0xC0) != 0x80) return fail(start);
    cp = (cp << 6) | (byte(i++) & 0x3F);
  }
  // reject overlong encodings and surrogates
  static constexpr char32_t kMin[4] = {0, 0x80, 0x800, 0x10000};
  if (cp < kMin[extra] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return fail(start);
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_space_cp(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v' ||
         c == 0x00A0;
}

// Hyphen-minus plus the Unicode dash block; these split tokens.
bool is_dash_cp(char32_t c) { return c == U'-' || (c >= 0x2010 && c <= 0x2015); }

bool is_letter_or_digit_cp(char32_t c) {
  if (c < 0x80) {
    return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') || (c >= U'0' && c <= U'9');
  }
  // Latin-1 letters and the Latin Extended-A block cover the bundled corpora;
  // anything alphabetic beyond that is treated as a letter too, leaving only
  // punctuation/symbol ranges out.
  if (c == 0x00D7 || c == 0x00F7) return false;  // multiplication/division signs
  if (c >= 0x00C0 && c <= 0x024F) return true;
  if (c >= 0x0370 && c <= 0x1FFF) return true;
  return false;
}

char32_t fold_case_cp(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 0x20;
  // Latin-1 uppercase block, minus the multiplication sign
  if (c >= 0x00C0 && c <= 0x00DE && c != 0x00D7) return c + 0x20;
  return c;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

SourceKind source_kind_from_name(const std::string& filename) {
  if (filename.rfind("interview", 0) == 0) return SourceKind::interview;
  if (filename.rfind("written", 0) == 0) return SourceKind::written_text;
  if (filename.rfind("narrative", 0) == 0) return SourceKind::narrative;
  return SourceKind::other;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read file: " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

const char* to_string(SourceKind k) {
  switch (k) {
    case SourceKind::interview: return "interview";
    case SourceKind::written_text: return "written_text";
    case SourceKind::narrative: return "narrative";
    default: return "other";
  }
}

void PreprocessConfig::validate() const {
  if (sentence_delimiters.empty())
    throw ValidationError("preprocess config: sentence delimiter set is empty");
  if (stemmer == StemmerKind::external_table && stem_table.empty())
    throw ValidationError("preprocess config: external_table stemmer selected but table is empty");
}

std::unordered_set<std::string> load_stopwords(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot read stopword file: " + file.string());
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    words.insert(line);
  }
  return words;
}

std::unordered_map<std::string, std::string> load_stem_table(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot read stem table: " + file.string());
  std::unordered_map<std::string, std::string> table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto cols = split_csv_line(line);
    if (cols.size() != 2 || cols[0].empty() || cols[1].empty())
      throw ParseError(file.string() + ":" + std::to_string(lineno) +
                       ": expected two columns word,stem");
    table[cols[0]] = cols[1];
  }
  return table;
}

std::vector<ActorAttributes> load_manifest(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot read manifest: " + file.string());
  std::string line;
  if (!std::getline(in, line))
    throw ParseError(file.string() + ": empty manifest");
  const std::vector<std::string> expected = {"member_id", "group_id",          "position",
                                             "gender",    "artistic_education", "genre"};
  if (split_csv_line(line) != expected)
    throw ParseError(file.string() +
                     ":1: bad header, expected "
                     "member_id,group_id,position,gender,artistic_education,genre");
  std::vector<ActorAttributes> rows;
  std::unordered_set<std::string> seen;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cols = split_csv_line(line);
    if (cols.size() != 6)
      throw ParseError(file.string() + ":" + std::to_string(lineno) + ": expected 6 columns, got " +
                       std::to_string(cols.size()));
    ActorAttributes a;
    a.member_id = cols[0];
    a.group_id = cols[1];
    try {
      a.position = position_from_string(cols[2]);
    } catch (const ValidationError& e) {
      throw ParseError(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    a.gender = cols[3];
    a.artistic_education = cols[4];
    a.genre = cols[5];
    if (a.member_id.empty())
      throw ParseError(file.string() + ":" + std::to_string(lineno) + ": empty member_id");
    if (!seen.insert(a.member_id).second)
      throw ParseError(file.string() + ":" + std::to_string(lineno) + ": duplicate member_id '" +
                       a.member_id + "'");
    rows.push_back(std::move(a));
  }
  if (rows.empty()) throw ParseError(file.string() + ": manifest lists no members");
  return rows;
}

std::vector<RawDocument> load_corpus(const fs::path& root,
                                     const std::vector<ActorAttributes>& manifest) {
  if (!fs::is_directory(root)) throw IoError("corpus root is not a directory: " + root.string());
  std::unordered_set<std::string> roster;
  for (const auto& a : manifest) roster.insert(a.member_id);
  for (const auto& entry : fs::directory_iterator(root)) {
    if (!entry.is_directory()) continue;
    const std::string name = entry.path().filename().string();
    if (!roster.count(name))
      throw ValidationError("corpus directory '" + name + "' matches no manifest member");
  }
  std::vector<RawDocument> docs;
  for (const auto& a : manifest) {
    const fs::path dir = root / a.member_id;
    if (!fs::is_directory(dir)) continue;  // member with no texts
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".txt")
        files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      RawDocument d;
      d.member_id = a.member_id;
      d.source_kind = source_kind_from_name(f.filename().string());
      d.path = f.string();
      d.text = read_file(f);
      // validate encoding up front so the error names the file
      std::size_t i = 0;
      while (i < d.text.size()) next_codepoint(d.text, i, f.string());
      docs.push_back(std::move(d));
    }
  }
  return docs;
}

std::string apply_stemmer(const std::string& token, const PreprocessConfig& cfg) {
  switch (cfg.stemmer) {
    case StemmerKind::porter_english:
      return porter_stem(token);
    case StemmerKind::external_table: {
      const auto it = cfg.stem_table.find(token);
      return it == cfg.stem_table.end() ? token : it->second;
    }
    default:
      return token;
  }
}

std::vector<Sentence> preprocess(const RawDocument& doc, const PreprocessConfig& cfg,
                                 std::size_t* word_count) {
  cfg.validate();
  const std::string where = doc.path.empty() ? ("document of " + doc.member_id) : doc.path;
  std::vector<Sentence> sentences;
  Sentence sentence;
  std::string token;
  std::size_t words = 0;

  const auto flush_token = [&] {
    if (token.empty()) return;
    ++words;
    if (!cfg.stopwords.count(token)) sentence.tokens.push_back(apply_stemmer(token, cfg));
    token.clear();
  };
  const auto flush_sentence = [&] {
    flush_token();
    if (!sentence.tokens.empty()) sentences.push_back(std::move(sentence));
    sentence = Sentence{};
  };

  std::size_t i = 0;
  while (i < doc.text.size()) {
    char32_t cp = next_codepoint(doc.text, i, where);
    if (cfg.case_fold) cp = fold_case_cp(cp);
    if (cfg.sentence_delimiters.find(cp) != std::u32string::npos) {
      flush_sentence();
    } else if (is_space_cp(cp) || is_dash_cp(cp)) {
      flush_token();
    } else if (is_letter_or_digit_cp(cp)) {
      append_utf8(token, cp);
    } else if (!cfg.strip_punctuation) {
      append_utf8(token, cp);
    }
    // stripped punctuation neither extends the token nor breaks adjacency
  }
  flush_sentence();
  if (word_count) *word_count = words;
  return sentences;
}

std::vector<MemberCorpus> preprocess_corpus(const std::vector<RawDocument>& docs,
                                            const std::vector<ActorAttributes>& manifest,
                                            const PreprocessConfig& cfg) {
  cfg.validate();
  const int ndocs = static_cast<int>(docs.size());
  std::vector<std::vector<Sentence>> doc_sentences(ndocs);
  std::vector<std::size_t> doc_words(ndocs, 0);
  std::string error;
#pragma omp parallel for schedule(dynamic) if (ndocs > 1)
  for (int d = 0; d < ndocs; ++d) {
    try {
      doc_sentences[d] = preprocess(docs[d], cfg, &doc_words[d]);
    } catch (const std::exception& e) {
#pragma omp critical
      if (error.empty()) error = e.what();
    }
  }
  if (!error.empty()) throw ParseError(error);

  std::map<MemberId, MemberCorpus> by_member;
  for (const auto& a : manifest) {
    by_member[a.member_id].member_id = a.member_id;
  }
  for (int d = 0; d < ndocs; ++d) {
    const auto it = by_member.find(docs[d].member_id);
    if (it == by_member.end())
      throw ValidationError("document member '" + docs[d].member_id + "' not in manifest");
    auto& mc = it->second;
    mc.sentences.insert(mc.sentences.end(), doc_sentences[d].begin(), doc_sentences[d].end());
    mc.total_word_count += doc_words[d];
  }
  std::vector<MemberCorpus> out;
  out.reserve(manifest.size());
  for (const auto& a : manifest) out.push_back(std::move(by_member[a.member_id]));
  return out;
}

}  // namespace ssn
