#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace revlab {

struct FunctionSpan {
  std::string file;  // filled by callers that know the path
  std::string name;
  int start_line = 0;  // 1-based first line of the declaration (signature start)
  int end_line = 0;    // 1-based line of the body's closing brace
};

struct ParseResult {
  std::vector<FunctionSpan> spans;
  bool balanced = true;
};

// Heuristic function-span scanner for C and C++ sources.
//
// It is not a grammar: it tracks comments, string/char literals (raw strings
// and digit separators included), preprocessor lines, brace scopes, and the
// token shape  qualified-name ( args ) [trivia] [: ctor-inits] {  to decide
// where function bodies start. Known non-goals, acceptable for change
// localization: preprocessor conditionals are not evaluated, K&R parameter
// declarations and exotic declarators (functions returning function
// pointers) are not recognized.
class FunctionParser {
 public:
  ParseResult parse(std::string_view src) {
    src_ = src;
    pos_ = 0;
    line_ = 1;
    at_line_start_ = true;
    malformed_ = false;
    frames_.clear();
    reset_statement();
    result_ = ParseResult{};

    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') {
        ++pos_;
        ++line_;
        at_line_start_ = true;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
        continue;
      }
      if (c == '/' && peek(1) == '/') {
        skip_line_comment();
        continue;
      }
      if (c == '/' && peek(1) == '*') {
        skip_block_comment();
        continue;
      }
      if (c == '#' && at_line_start_) {
        skip_preprocessor_line();
        continue;
      }
      at_line_start_ = false;
      if (c == '"') {
        skip_string();
        continue;
      }
      if (c == '\'') {
        skip_char_literal();
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        skip_number();
        continue;
      }
      if (is_ident_start(c) || c == '~') {
        read_identifier();
        continue;
      }
      on_punct(c);
      ++pos_;
    }

    if (!frames_.empty()) malformed_ = true;
    result_.balanced = !malformed_;
    std::sort(result_.spans.begin(), result_.spans.end(),
              [](const FunctionSpan& a, const FunctionSpan& b) {
                return a.start_line < b.start_line;
              });
    return result_;
  }

 private:
  enum class Sig { scan, in_args, post_args, ctor_init };

  struct Frame {
    bool body = false;
    std::string name;
    int start_line = 0;
  };

  static bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }
  static bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }

  char peek(size_t ahead) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  bool in_body() const {
    for (const Frame& f : frames_)
      if (f.body) return true;
    return false;
  }

  void reset_statement() {
    sig_ = Sig::scan;
    chain_.clear();
    chain_live_ = false;
    stmt_line_ = 0;
    candidate_.clear();
    candidate_line_ = 0;
    pending_scope_sep_ = false;
    pending_tilde_ = false;
    collecting_operator_ = false;
    nest_ = 0;
    angle_ = 0;
    skip_group_ = 0;
    last_init_char_ = '\0';
  }

  // --- lexical skipping -------------------------------------------------

  void skip_line_comment() {
    while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
  }

  void skip_block_comment() {
    pos_ += 2;
    while (pos_ < src_.size()) {
      if (src_[pos_] == '\n') ++line_;
      if (src_[pos_] == '*' && peek(1) == '/') {
        pos_ += 2;
        return;
      }
      ++pos_;
    }
    malformed_ = true;  // unterminated comment
  }

  void skip_preprocessor_line() {
    // Consume the whole logical line, honoring backslash continuations and
    // comments/strings inside the directive.
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\\' && (peek(1) == '\n' || (peek(1) == '\r' && peek(2) == '\n'))) {
        pos_ += peek(1) == '\n' ? 2 : 3;
        ++line_;
        continue;
      }
      if (c == '\n') {
        ++pos_;
        ++line_;
        at_line_start_ = true;
        return;
      }
      if (c == '/' && peek(1) == '/') {
        skip_line_comment();
        continue;
      }
      if (c == '/' && peek(1) == '*') {
        skip_block_comment();
        continue;
      }
      if (c == '"') {
        skip_string();
        continue;
      }
      if (c == '\'') {
        skip_char_literal();
        continue;
      }
      ++pos_;
    }
  }

  void skip_string() {
    ++pos_;  // opening quote
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\\' && pos_ + 1 < src_.size()) {
        if (peek(1) == '\n') ++line_;
        pos_ += 2;
        continue;
      }
      if (c == '"') {
        ++pos_;
        return;
      }
      if (c == '\n') {
        // Unterminated ordinary string literal: resync at the newline.
        malformed_ = true;
        return;
      }
      ++pos_;
    }
    malformed_ = true;
  }

  void skip_raw_string() {
    // pos_ is at the opening quote of  R"delim( ... )delim"
    ++pos_;
    std::string delim;
    while (pos_ < src_.size() && src_[pos_] != '(') {
      delim += src_[pos_];
      ++pos_;
    }
    ++pos_;  // '('
    std::string closer = ")" + delim + "\"";
    size_t end = src_.find(closer, pos_);
    if (end == std::string_view::npos) {
      malformed_ = true;
      pos_ = src_.size();
      return;
    }
    for (size_t i = pos_; i < end; ++i)
      if (src_[i] == '\n') ++line_;
    pos_ = end + closer.size();
  }

  void skip_char_literal() {
    ++pos_;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\\' && pos_ + 1 < src_.size()) {
        pos_ += 2;
        continue;
      }
      if (c == '\'') {
        ++pos_;
        return;
      }
      if (c == '\n') {
        malformed_ = true;
        return;
      }
      ++pos_;
    }
    malformed_ = true;
  }

  void skip_number() {
    // Handles hex/bin/float forms, digit separators (1'000), exponent signs
    // and user-defined literal suffixes.
    ++pos_;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (is_ident_char(c) || c == '.') {
        char prev = src_[pos_ - 1];
        if ((c == '+' || c == '-') && !(prev == 'e' || prev == 'E' || prev == 'p' || prev == 'P'))
          break;
        ++pos_;
        continue;
      }
      if (c == '\'' && pos_ + 1 < src_.size() && is_ident_char(src_[pos_ + 1])) {
        pos_ += 2;
        continue;
      }
      if ((c == '+' || c == '-') &&
          (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E' || src_[pos_ - 1] == 'p' ||
           src_[pos_ - 1] == 'P')) {
        ++pos_;
        continue;
      }
      break;
    }
  }

  // --- recognizer -------------------------------------------------------

  static bool is_control_keyword(const std::string& w) {
    static const std::unordered_set<std::string> kw = {
        "if",      "for",       "while",   "switch",   "catch",     "return",
        "do",      "else",      "new",     "delete",   "sizeof",    "alignof",
        "case",    "goto",      "co_await", "co_return", "co_yield", "throw",
        "decltype", "requires", "asm",     "alignas",  "static_assert",
    };
    return kw.count(w) > 0;
  }

  void read_identifier() {
    int word_line = line_;
    bool tilde = false;
    if (src_[pos_] == '~') {
      tilde = true;
      ++pos_;
      if (pos_ >= src_.size() || !is_ident_start(src_[pos_])) return;  // operator~ etc.
    }
    size_t start = pos_;
    while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
    std::string word(src_.substr(start, pos_ - start));

    // String-literal prefixes: L"", u8"", R"()", u8R"()", ...
    if (pos_ < src_.size() && src_[pos_] == '"' &&
        (word == "R" || word == "L" || word == "u" || word == "U" || word == "u8" ||
         word == "LR" || word == "uR" || word == "UR" || word == "u8R")) {
      if (word.back() == 'R')
        skip_raw_string();
      else
        skip_string();
      return;
    }

    if (in_body()) return;

    if (sig_ == Sig::in_args || skip_group_ > 0 || angle_ > 0) return;

    if (sig_ == Sig::post_args) {
      // Trailing trivia: const, noexcept, override, try, macros, return types.
      return;
    }
    if (sig_ == Sig::ctor_init) {
      last_init_char_ = 'a';
      return;
    }

    if (collecting_operator_) {
      chain_ += " " + word;  // operator new, operator bool
      return;
    }

    if (tilde) word = "~" + word;
    if (is_control_keyword(word)) {
      chain_.clear();
      chain_live_ = false;
      last_ident_control_ = true;
      if (stmt_line_ == 0) stmt_line_ = word_line;
      pending_scope_sep_ = false;
      return;
    }
    last_ident_control_ = false;
    if (stmt_line_ == 0) stmt_line_ = word_line;
    if (pending_scope_sep_ && chain_live_) {
      chain_ += "::" + word;
    } else {
      chain_ = word;
      chain_live_ = true;
    }
    pending_scope_sep_ = false;
    if (word == "operator" || (chain_.size() >= 8 && chain_.compare(chain_.size() - 8, 8, "operator") == 0 &&
                               (chain_.size() == 8 || chain_[chain_.size() - 9] == ':'))) {
      collecting_operator_ = true;
    }
  }

  void push_frame(bool body) {
    Frame f;
    f.body = body;
    if (body) {
      f.name = candidate_;
      f.start_line = candidate_line_;
    }
    frames_.push_back(std::move(f));
  }

  void pop_frame() {
    if (frames_.empty()) {
      malformed_ = true;
      return;
    }
    Frame f = std::move(frames_.back());
    frames_.pop_back();
    if (f.body) {
      FunctionSpan span;
      span.name = f.name;
      span.start_line = f.start_line;
      span.end_line = line_;
      result_.spans.push_back(std::move(span));
    }
  }

  void on_punct(char c) {
    if (in_body()) {
      if (c == '{') push_frame(false);
      if (c == '}') pop_frame();
      return;
    }

    if (skip_group_ > 0) {
      if (c == '(' || c == '[' || c == '{') ++skip_group_;
      if (c == ')' || c == ']' || c == '}') --skip_group_;
      return;
    }

    if (angle_ > 0) {
      // Template-argument consumption; bail out on statement structure.
      if (c == '<') ++angle_;
      else if (c == '>') --angle_;
      else if (c == '(' || c == '[') { skip_group_ = 1; }
      else if (c == ';' || c == '{' || c == '}') {
        angle_ = 0;
        chain_live_ = false;
        on_punct(c);
      }
      return;
    }

    switch (sig_) {
      case Sig::scan:
        on_punct_scan(c);
        break;
      case Sig::in_args:
        if (c == '(' || c == '[' || c == '{') ++nest_;
        else if (c == ']' || c == '}') --nest_;
        else if (c == ')') {
          --nest_;
          if (nest_ == 0) sig_ = Sig::post_args;
        }
        break;
      case Sig::post_args:
        on_punct_post_args(c);
        break;
      case Sig::ctor_init:
        on_punct_ctor_init(c);
        break;
    }
  }

  void on_punct_scan(char c) {
    switch (c) {
      case '(':
        if (collecting_operator_) {
          // operator()(args): the first () pair is part of the name.
          size_t save = pos_;
          size_t j = pos_ + 1;
          while (j < src_.size() && std::isspace(static_cast<unsigned char>(src_[j]))) ++j;
          if (j < src_.size() && src_[j] == ')' && chain_.find("()") == std::string::npos) {
            chain_ += "()";
            pos_ = j;  // main loop advances past ')'
            (void)save;
            return;
          }
          collecting_operator_ = false;
        }
        if (chain_live_ && !last_ident_control_) {
          candidate_ = chain_;
          candidate_line_ = stmt_line_ != 0 ? stmt_line_ : line_;
          sig_ = Sig::in_args;
          nest_ = 1;
        } else {
          skip_group_ = 1;
        }
        break;
      case '[':
        skip_group_ = 1;
        break;
      case '<':
        if (collecting_operator_) {
          chain_ += c;
          break;
        }
        if (chain_live_) angle_ = 1;
        break;
      case ':':
        if (peek(1) == ':') {
          pending_scope_sep_ = true;
          ++pos_;  // consume the second ':'
        } else {
          chain_.clear();
          chain_live_ = false;
          collecting_operator_ = false;
        }
        break;
      case ';':
      case ',':
      case '=':
        if (collecting_operator_ && c == '=') {
          chain_ += c;
          break;
        }
        if (c == ';') {
          reset_statement();
        } else {
          chain_.clear();
          chain_live_ = false;
          collecting_operator_ = false;
        }
        break;
      case '{':
        push_frame(false);
        reset_statement();
        break;
      case '}':
        pop_frame();
        reset_statement();
        break;
      default:
        if (collecting_operator_) chain_ += c;
        break;
    }
  }

  void on_punct_post_args(char c) {
    switch (c) {
      case '{': {
        push_frame(true);
        reset_statement();
        break;
      }
      case ';':
        reset_statement();
        break;
      case ',':
      case '=':
        sig_ = Sig::scan;
        chain_.clear();
        chain_live_ = false;
        break;
      case ':':
        if (peek(1) == ':') {
          ++pos_;  // qualified trailing return type
        } else {
          sig_ = Sig::ctor_init;
          nest_ = 0;
          last_init_char_ = '\0';
        }
        break;
      case '(':
      case '[':
        skip_group_ = 1;
        break;
      case '<':
        angle_ = 1;
        break;
      case '}':
        sig_ = Sig::scan;
        chain_.clear();
        chain_live_ = false;
        pop_frame();
        reset_statement();
        break;
      default:
        break;  // * & -> and friends
    }
  }

  void on_punct_ctor_init(char c) {
    if (c == '{' && nest_ == 0) {
      if (last_init_char_ == ')' || last_init_char_ == '}') {
        push_frame(true);
        reset_statement();
      } else {
        ++nest_;
        last_init_char_ = c;
      }
      return;
    }
    if (c == '(' || c == '[' || (c == '{' && nest_ > 0)) {
      ++nest_;
    } else if (c == ')' || c == ']' || c == '}') {
      --nest_;
      if (nest_ < 0) {
        malformed_ = true;
        nest_ = 0;
      }
    } else if (c == ';' && nest_ == 0) {
      reset_statement();
      return;
    }
    last_init_char_ = c;
  }

  std::string_view src_;
  size_t pos_ = 0;
  int line_ = 1;
  bool at_line_start_ = true;
  bool malformed_ = false;
  std::vector<Frame> frames_;
  ParseResult result_;

  Sig sig_ = Sig::scan;
  std::string chain_;
  bool chain_live_ = false;
  bool last_ident_control_ = false;
  int stmt_line_ = 0;
  std::string candidate_;
  int candidate_line_ = 0;
  bool pending_scope_sep_ = false;
  bool pending_tilde_ = false;
  bool collecting_operator_ = false;
  int nest_ = 0;
  int angle_ = 0;
  int skip_group_ = 0;
  char last_init_char_ = '\0';
};

inline ParseResult parse_functions(std::string_view source) {
  FunctionParser parser;
  return parser.parse(source);
}

}  // namespace revlab
