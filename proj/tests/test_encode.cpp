#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>

#include "revlab/encoder.hpp"
#include "revlab/perturber.hpp"

using namespace revlab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "revlab-encode-XXXXXX").string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (mkdtemp(buf.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
    path = buf.data();
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

Tokenizer ws_tokenizer(int budget = 512) {
  TokenizerSpec spec;
  spec.budget = budget;
  return Tokenizer(spec);
}

DatasetSample make_sample(const std::string& before, const std::string& after,
                          const std::string& id = "s1") {
  DatasetSample s;
  s.id = id;
  s.project = "proj";
  s.commit_hash = "hash-" + id;
  s.label = Label::clean;
  s.transition = Transition::CtoC;
  s.function_before = before;
  s.function_after = after;
  LineDiff diff = diff_lines(before, after);
  s.deleted_lines_local = diff.deleted_lines;
  s.added_lines_local = diff.added_lines;
  s.commit_message = "zanzibar commit message\n";
  s.commit_time = 1600000000;
  return s;
}

int count_token(const EncodedInput& e, const std::string& token) {
  return static_cast<int>(std::count(e.tokens.begin(), e.tokens.end(), token));
}

const char* kBeforeText =
    "int f(int x) {\n"
    "  int y = x + 1;\n"
    "  return y;\n"
    "}";
const char* kAfterText =
    "int f(int x) {\n"
    "  int y = x + 2;\n"
    "  int z = y * 2;\n"
    "  return z;\n"
    "}";

// -------------------------------------------------------------- tokenizer

TEST(Tok, SplitsWordsAndPunctuation) {
  Tokenizer tok = ws_tokenizer();
  EXPECT_EQ(tok.tokenize("int x = a1 + _b;"),
            (std::vector<std::string>{"int", "x", "=", "a1", "+", "_b", ";"}));
  EXPECT_EQ(tok.tokenize("a+=b"), (std::vector<std::string>{"a", "+", "=", "b"}));
  EXPECT_EQ(tok.tokenize("  \n\t "), std::vector<std::string>{});
  EXPECT_EQ(tok.tokenize(""), std::vector<std::string>{});
}

TEST(Tok, NewlinesOnlySeparate) {
  Tokenizer tok = ws_tokenizer();
  EXPECT_EQ(tok.tokenize("a\nb"), tok.tokenize("a b"));
}

TEST(Tok, MultibyteSequencesStayWhole) {
  Tokenizer tok = ws_tokenizer();
  std::vector<std::string> tokens = tok.tokenize("h\xc3\xa9llo w\xc3\xb6rld");
  ASSERT_EQ(tokens.size(), 2u);
  EXPECT_EQ(tokens[0], "h\xc3\xa9llo");
}

TEST(Tok, SpecValidation) {
  TokenizerSpec spec;
  spec.budget = 0;
  EXPECT_THROW(Tokenizer{spec}, ConfigError);
  spec.budget = -5;
  EXPECT_THROW(Tokenizer{spec}, ConfigError);
  TokenizerSpec subword;
  subword.kind = TokenizerKind::subword_vocab;  // no vocab path
  EXPECT_THROW(Tokenizer{subword}, ConfigError);
  subword.vocab_path = "/nonexistent/vocab.txt";
  EXPECT_THROW(Tokenizer{subword}, ConfigError);
}

TEST(Tok, SubwordMergesApplyByRank) {
  TempDir dir;
  fs::path vocab = dir.path / "vocab.txt";
  std::ofstream(vocab) << "# merge rules, best first\n"
                          "r e\n"
                          "re t\n"
                          "ret u\n"
                          "retu r\n"
                          "retur n\n"
                          "a b\n";
  TokenizerSpec spec;
  spec.kind = TokenizerKind::subword_vocab;
  spec.vocab_path = vocab;
  Tokenizer tok(spec);
  EXPECT_EQ(tok.tokenize("return"), std::vector<std::string>{"return"});
  EXPECT_EQ(tok.tokenize("abc"), (std::vector<std::string>{"ab", "c"}));
  EXPECT_EQ(tok.tokenize("xyz"), (std::vector<std::string>{"x", "y", "z"}));
  // Punctuation is never merged.
  EXPECT_EQ(tok.tokenize("ab;"), (std::vector<std::string>{"ab", ";"}));
}

TEST(Tok, SubwordRankPriority) {
  TempDir dir;
  fs::path vocab = dir.path / "vocab.txt";
  std::ofstream(vocab) << "b c\na b\n";
  TokenizerSpec spec;
  spec.kind = TokenizerKind::subword_vocab;
  spec.vocab_path = vocab;
  Tokenizer tok(spec);
  // (b,c) outranks (a,b), so it merges first and blocks the other.
  EXPECT_EQ(tok.tokenize("abc"), (std::vector<std::string>{"a", "bc"}));
}

TEST(Tok, SubwordVocabFileProblemsAreConfigErrors) {
  TempDir dir;
  fs::path empty_vocab = dir.path / "empty.txt";
  std::ofstream(empty_vocab) << "# only comments\n\n";
  TokenizerSpec spec;
  spec.kind = TokenizerKind::subword_vocab;
  spec.vocab_path = empty_vocab;
  EXPECT_THROW(Tokenizer{spec}, ConfigError);
  fs::path bad_vocab = dir.path / "bad.txt";
  std::ofstream(bad_vocab) << "justoneword\n";
  spec.vocab_path = bad_vocab;
  EXPECT_THROW(Tokenizer{spec}, ConfigError);
}

// -------------------------------------------------------------- encodings

TEST(AfterOnly, TokensAreTheAfterText) {
  Tokenizer tok = ws_tokenizer();
  DatasetSample s = make_sample(kBeforeText, kAfterText);
  EncodedInput e = encode_after_only(s, tok);
  EXPECT_EQ(e.encoding, Encoding::AfterOnly);
  EXPECT_EQ(e.tokens, tok.tokenize(kAfterText));
  EXPECT_FALSE(e.truncated);
  EXPECT_EQ(e.budget_used, static_cast<int>(e.tokens.size()));
  EXPECT_EQ(e.sample_id, "s1");
}

TEST(AfterOnly, BudgetBoundary) {
  DatasetSample s = make_sample("", "a b c d e");
  Tokenizer exact = ws_tokenizer(5);
  EncodedInput at = encode_after_only(s, exact);
  EXPECT_EQ(at.tokens.size(), 5u);
  EXPECT_FALSE(at.truncated);
  Tokenizer tight = ws_tokenizer(4);
  EncodedInput over = encode_after_only(s, tight);
  EXPECT_EQ(over.tokens.size(), 4u);
  EXPECT_TRUE(over.truncated);
  EXPECT_EQ(over.tokens, (std::vector<std::string>{"a", "b", "c", "d"}));  // head kept
  EXPECT_EQ(over.budget_used, 4);
}

TEST(AfterMarkers, TagsLeadEveryModifiedLine) {
  Tokenizer tok = ws_tokenizer();
  DatasetSample s = make_sample(kBeforeText, kAfterText);
  ASSERT_EQ(s.added_lines_local, (std::vector<int>{2, 3, 4}));
  EncodedInput e = encode_after_markers(s, tok);
  EXPECT_EQ(count_token(e, kChangeTag), 3);
  // First tag sits right before line 2's first token.
  std::vector<std::string> line1 = tok.tokenize("int f(int x) {");
  ASSERT_GT(e.tokens.size(), line1.size());
  EXPECT_EQ(e.tokens[line1.size()], kChangeTag);
}

TEST(AfterMarkers, NoModifiedLinesEqualsAfterOnly) {
  Tokenizer tok = ws_tokenizer();
  DatasetSample s = make_sample(kAfterText, kAfterText);
  EXPECT_TRUE(s.added_lines_local.empty());
  EncodedInput markers = encode_after_markers(s, tok);
  EncodedInput plain = encode_after_only(s, tok);
  EXPECT_EQ(markers.tokens, plain.tokens);
  EXPECT_EQ(markers.encoding, Encoding::AfterMarkers);
}

TEST(AfterMarkers, LookalikeTextCannotForgeTags) {
  Tokenizer tok = ws_tokenizer();
  // The after text contains the literal characters <CHG>; they tokenize into
  // punctuation pieces, never into the atomic tag token.
  DatasetSample s = make_sample("int g() {\n  return 0;\n}",
                                "int g() {\n  // <CHG> note\n  return 0;\n}");
  ASSERT_EQ(s.added_lines_local.size(), 1u);
  EncodedInput e = encode_after_markers(s, tok);
  EXPECT_EQ(count_token(e, kChangeTag), 1);
}

TEST(BeforeAfter, ShortSidesAreComplete) {
  Tokenizer tok = ws_tokenizer();
  DatasetSample s = make_sample(kBeforeText, kAfterText);
  EncodedInput e = encode_before_after(s, tok);
  std::vector<std::string> expected;
  expected.push_back(kBeforeHeader);
  for (const std::string& t : tok.tokenize(kBeforeText)) expected.push_back(t);
  expected.push_back(kAfterHeader);
  for (const std::string& t : tok.tokenize(kAfterText)) expected.push_back(t);
  EXPECT_EQ(e.tokens, expected);
  EXPECT_FALSE(e.truncated);
}

TEST(BeforeAfter, LongBeforeIsCappedAtHalfWhileShortAfterCompletes) {
  // budget 12, overhead 2 → before cap 5. Before has 20 tokens, after 3.
  std::string before, after = "r s t";
  for (int i = 0; i < 20; ++i) before += "b" + std::to_string(i) + " ";
  DatasetSample s = make_sample(before, after);
  Tokenizer tok = ws_tokenizer(12);
  EncodedInput e = encode_before_after(s, tok);
  ASSERT_EQ(e.tokens[0], kBeforeHeader);
  auto after_header = std::find(e.tokens.begin(), e.tokens.end(), std::string(kAfterHeader));
  ASSERT_NE(after_header, e.tokens.end());
  size_t before_count = static_cast<size_t>(after_header - e.tokens.begin()) - 1;
  size_t after_count = e.tokens.size() - before_count - 2;
  EXPECT_EQ(before_count, 5u);  // capped at (12-2)/2
  EXPECT_EQ(after_count, 3u);   // complete
  EXPECT_TRUE(e.truncated);     // before side lost tokens
}

TEST(BeforeAfter, BothLongHitTheirCapsExactly) {
  std::string before, after;
  for (int i = 0; i < 40; ++i) {
    before += "b" + std::to_string(i) + " ";
    after += "a" + std::to_string(i) + " ";
  }
  DatasetSample s = make_sample(before, after);
  Tokenizer tok = ws_tokenizer(12);
  EncodedInput e = encode_before_after(s, tok);
  EXPECT_EQ(e.tokens.size(), 12u);
  auto after_header = std::find(e.tokens.begin(), e.tokens.end(), std::string(kAfterHeader));
  size_t before_count = static_cast<size_t>(after_header - e.tokens.begin()) - 1;
  EXPECT_EQ(before_count, 5u);
  EXPECT_EQ(e.tokens.size() - before_count - 2, 5u);
  EXPECT_TRUE(e.truncated);
}

TEST(BeforeAfter, ShortBeforeLendsCapacityToAfter) {
  std::string after;
  for (int i = 0; i < 40; ++i) after += "a" + std::to_string(i) + " ";
  DatasetSample s = make_sample("x", after);
  Tokenizer tok = ws_tokenizer(12);
  EncodedInput e = encode_before_after(s, tok);
  // before takes 1 of its 5-token cap; after fills 12-2-1 = 9 slots.
  EXPECT_EQ(e.tokens.size(), 12u);
  auto after_header = std::find(e.tokens.begin(), e.tokens.end(), std::string(kAfterHeader));
  size_t before_count = static_cast<size_t>(after_header - e.tokens.begin()) - 1;
  EXPECT_EQ(before_count, 1u);
  EXPECT_EQ(e.tokens.size() - before_count - 2, 9u);
}

TEST(BeforeAfter, AfterSideNonEmptyAtMinimalBudget) {
  DatasetSample s = make_sample("x y z", "p q r");
  Tokenizer tok = ws_tokenizer(3);
  EncodedInput e = encode_before_after(s, tok);
  ASSERT_EQ(e.tokens.size(), 3u);
  EXPECT_EQ(e.tokens[0], kBeforeHeader);
  EXPECT_EQ(e.tokens[1], kAfterHeader);
  EXPECT_EQ(e.tokens[2], "p");
}

TEST(DiffTags, InsertionWithContextOne) {
  DatasetSample s = make_sample("a\nb\n", "a\nx\nb\n");
  Tokenizer tok = ws_tokenizer();
  EncodedInput e = encode_diff_tags(s, tok, 1);
  EXPECT_EQ(e.tokens, (std::vector<std::string>{"a", kAddTag, "x", "b"}));
}

TEST(DiffTags, DeletionOnlyShowsDelAndContext) {
  DatasetSample s = make_sample("a\nb\nc\n", "a\nc\n");
  Tokenizer tok = ws_tokenizer();
  EncodedInput e = encode_diff_tags(s, tok, 1);
  EXPECT_EQ(e.tokens, (std::vector<std::string>{"a", kDelTag, "b", "c"}));
  EXPECT_EQ(count_token(e, kAddTag), 0);
}

TEST(DiffTags, ContextZeroShowsChangedLinesOnly) {
  DatasetSample s = make_sample("a\nb\nc\n", "a\nc\n");
  Tokenizer tok = ws_tokenizer();
  EncodedInput e = encode_diff_tags(s, tok, 0);
  EXPECT_EQ(e.tokens, (std::vector<std::string>{kDelTag, "b"}));
}

TEST(DiffTags, SeparatedHunksGetSeparatorToken) {
  DatasetSample s = make_sample("a\nb\nc\nd\ne\nf\ng\n", "a\nX\nc\nd\ne\nY\ng\n");
  Tokenizer tok = ws_tokenizer();
  EncodedInput e = encode_diff_tags(s, tok, 1);
  EXPECT_EQ(e.tokens,
            (std::vector<std::string>{"a", kDelTag, "b", kAddTag, "X", "c", kHunkTag, "e", kDelTag,
                                      "f", kAddTag, "Y", "g"}));
  EXPECT_EQ(count_token(e, kHunkTag), 1);
}

TEST(DiffTags, ReplaceListsDeletionsBeforeAdditions) {
  DatasetSample s = make_sample(kBeforeText, kAfterText);
  Tokenizer tok = ws_tokenizer();
  EncodedInput e = encode_diff_tags(s, tok, 3);
  EXPECT_EQ(count_token(e, kDelTag), static_cast<int>(s.deleted_lines_local.size()));
  EXPECT_EQ(count_token(e, kAddTag), static_cast<int>(s.added_lines_local.size()));
  auto first_add = std::find(e.tokens.begin(), e.tokens.end(), std::string(kAddTag));
  auto first_del = std::find(e.tokens.begin(), e.tokens.end(), std::string(kDelTag));
  EXPECT_LT(first_del, first_add);
}

TEST(DiffTags, IdenticalTextsProduceNoTokens) {
  DatasetSample s = make_sample("a\nb\n", "a\nb\n");
  Tokenizer tok = ws_tokenizer();
  EncodedInput e = encode_diff_tags(s, tok, 3);
  EXPECT_TRUE(e.tokens.empty());
}

TEST(DiffTags, NegativeContextRejected) {
  DatasetSample s = make_sample("a\n", "b\n");
  Tokenizer tok = ws_tokenizer();
  EXPECT_THROW(encode_diff_tags(s, tok, -1), ConfigError);
}

TEST(AddedDeleted, HeadersFrameTheSections) {
  DatasetSample s = make_sample("a\nb\nc\n", "a\nx\ny\nc\n");
  ASSERT_EQ(s.deleted_lines_local, std::vector<int>{2});
  ASSERT_EQ(s.added_lines_local, (std::vector<int>{2, 3}));
  Tokenizer tok = ws_tokenizer();
  EncodedInput e = encode_added_deleted(s, tok);
  EXPECT_EQ(e.tokens, (std::vector<std::string>{kAddedHeader, "x", "y", kDeletedHeader, "b"}));
}

TEST(AddedDeleted, AddOnlyLeavesDeletedSectionEmpty) {
  DatasetSample s = make_sample("a\nb\n", "a\nx\nb\n");
  Tokenizer tok = ws_tokenizer();
  EncodedInput e = encode_added_deleted(s, tok);
  EXPECT_EQ(e.tokens, (std::vector<std::string>{kAddedHeader, "x", kDeletedHeader}));
}

TEST(AllEncodings, CommitMessageNeverLeaks) {
  DatasetSample s = make_sample(kBeforeText, kAfterText);
  Tokenizer tok = ws_tokenizer();
  for (Encoding enc : all_encodings()) {
    EncodedInput e = encode(s, tok, enc);
    EXPECT_EQ(count_token(e, "zanzibar"), 0) << to_string(enc);
  }
}

TEST(AllEncodings, DispatcherSetsEncodingField) {
  DatasetSample s = make_sample(kBeforeText, kAfterText);
  Tokenizer tok = ws_tokenizer();
  for (Encoding enc : all_encodings()) EXPECT_EQ(encode(s, tok, enc).encoding, enc);
}

TEST(EncodedJson, RoundTrip) {
  DatasetSample s = make_sample(kBeforeText, kAfterText);
  Tokenizer tok = ws_tokenizer();
  for (Encoding enc : all_encodings()) {
    EncodedInput e = encode(s, tok, enc);
    EncodedInput back = encoded_from_json(encoded_to_json(e), "test");
    EXPECT_EQ(back, e);
  }
  Json bad{{"record", "encoded"}, {"sample_id", "x"}};
  EXPECT_THROW(encoded_from_json(bad, "t"), DataError);
}

// ------------------------------------------------------------- length cdf

TEST(LengthCdf, UniformLengthsSingleStep) {
  std::vector<DatasetSample> samples;
  for (int i = 0; i < 4; ++i)
    samples.push_back(make_sample("", "a b c d e f g h i j", "u" + std::to_string(i)));
  std::vector<CdfPoint> cdf = length_cdf(samples, ws_tokenizer());
  ASSERT_EQ(cdf.size(), 1u);
  EXPECT_EQ(cdf[0].token_count, 10);
  EXPECT_DOUBLE_EQ(cdf[0].cumulative_fraction, 1.0);
}

TEST(LengthCdf, TwoLengths) {
  std::vector<DatasetSample> samples = {make_sample("", "a b c d e", "p"),
                                        make_sample("", "a b c d e f g h i j k l m n o", "q")};
  std::vector<CdfPoint> cdf = length_cdf(samples, ws_tokenizer());
  ASSERT_EQ(cdf.size(), 2u);
  EXPECT_EQ(cdf[0].token_count, 5);
  EXPECT_DOUBLE_EQ(cdf[0].cumulative_fraction, 0.5);
  EXPECT_EQ(cdf[1].token_count, 15);
  EXPECT_DOUBLE_EQ(cdf[1].cumulative_fraction, 1.0);
}

TEST(LengthCdf, EmptyCorpusIsError) {
  EXPECT_THROW(length_cdf({}, ws_tokenizer()), DataError);
}

TEST(LengthCdf, MonotoneAndEndsAtOne) {
  SplitMix64 rng(99);
  std::vector<DatasetSample> samples;
  for (int i = 0; i < 50; ++i) {
    std::string text;
    int len = 1 + static_cast<int>(rng.bounded(40));
    for (int t = 0; t < len; ++t) text += "w" + std::to_string(t) + " ";
    samples.push_back(make_sample("", text, "m" + std::to_string(i)));
  }
  std::vector<CdfPoint> cdf = length_cdf(samples, ws_tokenizer());
  for (size_t i = 1; i < cdf.size(); ++i) {
    EXPECT_GT(cdf[i].token_count, cdf[i - 1].token_count);
    EXPECT_GE(cdf[i].cumulative_fraction, cdf[i - 1].cumulative_fraction);
  }
  EXPECT_DOUBLE_EQ(cdf.back().cumulative_fraction, 1.0);
  EXPECT_DOUBLE_EQ(fraction_exceeding(cdf, cdf.back().token_count), 0.0);
  EXPECT_DOUBLE_EQ(fraction_exceeding(cdf, 0), 1.0);
}

// ------------------------------------------------- randomized sample pool

std::vector<DatasetSample> random_samples(int count, uint64_t seed) {
  static const std::vector<std::string> pool = {
      "int a = b + c;", "if (x > 0) {", "}",           "return value;",
      "count += 1;",    "helper(a, b);", "// comment", "while (ok) {",
      "x = y * z;",     "break;",        "s = \"t\";", "log(level, msg);"};
  SplitMix64 rng(seed);
  std::vector<DatasetSample> samples;
  for (int i = 0; i < count; ++i) {
    int n = 1 + static_cast<int>(rng.bounded(14));
    std::vector<std::string> before_lines;
    for (int l = 0; l < n; ++l) before_lines.push_back(pool[rng.bounded(pool.size())]);
    std::vector<std::string> after_lines = before_lines;
    int edits = 1 + static_cast<int>(rng.bounded(4));
    for (int eidx = 0; eidx < edits; ++eidx) {
      uint64_t op = rng.bounded(3);
      if (op == 0 && !after_lines.empty()) {
        after_lines[rng.bounded(after_lines.size())] = pool[rng.bounded(pool.size())];
      } else if (op == 1) {
        size_t at = rng.bounded(after_lines.size() + 1);
        after_lines.insert(after_lines.begin() + static_cast<long>(at),
                           pool[rng.bounded(pool.size())]);
      } else if (!after_lines.empty()) {
        after_lines.erase(after_lines.begin() + static_cast<long>(rng.bounded(after_lines.size())));
      }
    }
    samples.push_back(make_sample(join_lines(before_lines, true), join_lines(after_lines, true),
                                  "rand-" + std::to_string(seed) + "-" + std::to_string(i)));
  }
  return samples;
}

TEST(Properties, BudgetLawAndExactTruncationFlag) {
  Tokenizer huge = ws_tokenizer(1000000);
  for (int budget : {8, 32, 512}) {
    Tokenizer tok = ws_tokenizer(budget);
    for (const DatasetSample& s : random_samples(60, 1234 + budget)) {
      for (Encoding enc : all_encodings()) {
        EncodedInput full = encode(s, huge, enc);
        EncodedInput e = encode(s, tok, enc);
        EXPECT_LE(static_cast<int>(e.tokens.size()), budget);
        EXPECT_EQ(e.budget_used, static_cast<int>(e.tokens.size()));
        if (enc == Encoding::BeforeAfter) {
          // The half-budget cap can drop tokens even when the total fits;
          // truncated means any token was dropped.
          EXPECT_EQ(e.truncated, e.tokens != full.tokens);
        } else {
          EXPECT_EQ(e.truncated, static_cast<int>(full.tokens.size()) > budget);
          size_t keep = std::min<size_t>(full.tokens.size(), static_cast<size_t>(budget));
          EXPECT_TRUE(std::equal(e.tokens.begin(), e.tokens.end(), full.tokens.begin(),
                                 full.tokens.begin() + static_cast<long>(keep)));
        }
      }
    }
  }
}

TEST(Properties, MarkerConservationPreTruncation) {
  Tokenizer huge = ws_tokenizer(1000000);
  for (const DatasetSample& s : random_samples(80, 777)) {
    EncodedInput markers = encode_after_markers(s, huge);
    EXPECT_EQ(count_token(markers, kChangeTag), static_cast<int>(s.added_lines_local.size()));
    EncodedInput diff = encode_diff_tags(s, huge, 3);
    EXPECT_EQ(count_token(diff, kAddTag), static_cast<int>(s.added_lines_local.size()));
    EXPECT_EQ(count_token(diff, kDelTag), static_cast<int>(s.deleted_lines_local.size()));
  }
}

TEST(Properties, BeforeAfterHalfBudgetLaw) {
  for (int budget : {8, 32, 512}) {
    Tokenizer tok = ws_tokenizer(budget);
    for (const DatasetSample& s : random_samples(40, 555 + budget)) {
      EncodedInput e = encode_before_after(s, tok);
      auto after_header = std::find(e.tokens.begin(), e.tokens.end(), std::string(kAfterHeader));
      ASSERT_NE(after_header, e.tokens.end());
      size_t before_count = static_cast<size_t>(after_header - e.tokens.begin()) - 1;
      EXPECT_LE(before_count, static_cast<size_t>((budget - 2) / 2));
    }
  }
}

TEST(Properties, EncodingDeterminism) {
  Tokenizer tok = ws_tokenizer();
  for (const DatasetSample& s : random_samples(30, 31337)) {
    for (Encoding enc : all_encodings()) {
      EXPECT_EQ(encode(s, tok, enc), encode(s, tok, enc));
    }
  }
}

// -------------------------------------------------------------- perturber

TEST(PerturbConfig, PhaseGating) {
  PerturbationConfig cfg;
  cfg.kind = Perturbation::SwappedSnapshots;
  cfg.phase = Phase::train;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.kind = Perturbation::ReversedDiffTags;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.kind = Perturbation::SpuriousMarkers;
  EXPECT_NO_THROW(cfg.validate());
  cfg.kind = Perturbation::SwappedBlocks;
  EXPECT_NO_THROW(cfg.validate());
  cfg.phase = Phase::test;
  cfg.kind = Perturbation::SwappedSnapshots;
  EXPECT_NO_THROW(cfg.validate());
  cfg.probability = 1.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.probability = -0.1;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(SpuriousMarkers, ZeroMarkersEqualsAfterOnly) {
  DatasetSample s = make_sample("same\n", "same\n");
  Tokenizer tok = ws_tokenizer();
  EncodedInput e = spurious_markers(s, tok, 42);
  EXPECT_EQ(e.tokens, encode_after_only(s, tok).tokens);
}

TEST(SpuriousMarkers, CountMatchedAndSeedReproducible) {
  std::string before = "a\nb\nc\nd\ne\nf\ng\nh\ni\nj\n";
  std::string after = "a\nB\nc\nD\ne\nF\ng\nh\ni\nj\n";
  DatasetSample s = make_sample(before, after);
  ASSERT_EQ(s.added_lines_local.size(), 3u);
  Tokenizer tok = ws_tokenizer();
  EncodedInput first = spurious_markers(s, tok, 42);
  EXPECT_EQ(count_token(first, kChangeTag), 3);
  EXPECT_EQ(first, spurious_markers(s, tok, 42));
  // Across many seeds the count never drifts.
  bool position_varies = false;
  for (uint64_t seed = 0; seed < 50; ++seed) {
    EncodedInput e = spurious_markers(s, tok, seed);
    EXPECT_EQ(count_token(e, kChangeTag), 3);
    if (e.tokens != first.tokens) position_varies = true;
  }
  EXPECT_TRUE(position_varies);
}

TEST(SpuriousMarkers, SurplusTagsTrailWhenCountExceedsLines) {
  DatasetSample s = make_sample("x\ny\nz\n", "p\nq\nr\n");
  s.added_lines_local = {1, 2, 3, 4, 5};  // degenerate upstream, defined here
  Tokenizer tok = ws_tokenizer();
  EncodedInput e = spurious_markers(s, tok, 7);
  EXPECT_EQ(count_token(e, kChangeTag), 5);
  // Every line tagged: tag, line, tag, line, tag, line, then two trailing.
  EXPECT_EQ(e.tokens, (std::vector<std::string>{kChangeTag, "p", kChangeTag, "q", kChangeTag, "r",
                                                kChangeTag, kChangeTag}));
}

TEST(SwapSnapshots, ForcedSwapExchangesSegmentsAndIsInvolutive) {
  DatasetSample s = make_sample(kBeforeText, kAfterText);
  Tokenizer tok = ws_tokenizer();
  bool swapped = false;
  EncodedInput e = swap_snapshots(s, tok, 1, 1.0, &swapped);
  EXPECT_TRUE(swapped);
  DatasetSample exchanged = s;
  std::swap(exchanged.function_before, exchanged.function_after);
  EncodedInput expected = encode_before_after(exchanged, tok);
  expected.sample_id = s.id;
  EXPECT_EQ(e, expected);
  // Swapping the already-exchanged sample restores the original encoding.
  EncodedInput twice = swap_snapshots(exchanged, tok, 1, 1.0, nullptr);
  twice.sample_id = s.id;
  EXPECT_EQ(twice.tokens, encode_before_after(s, tok).tokens);
}

TEST(SwapSnapshots, ForcedNoSwapIsStageOneOutput) {
  DatasetSample s = make_sample(kBeforeText, kAfterText);
  Tokenizer tok = ws_tokenizer();
  bool swapped = true;
  EncodedInput e = swap_snapshots(s, tok, 1, 0.0, &swapped);
  EXPECT_FALSE(swapped);
  EXPECT_EQ(e, encode_before_after(s, tok));
}

TEST(SwapSnapshots, SeedReplayAndPerSampleDerivation) {
  Tokenizer tok = ws_tokenizer();
  std::vector<DatasetSample> samples = random_samples(100, 2024);
  std::map<std::string, bool> pattern;
  int swapped_count = 0;
  for (const DatasetSample& s : samples) {
    bool swapped = false;
    swap_snapshots(s, tok, 99, 0.5, &swapped);
    pattern[s.id] = swapped;
    if (swapped) ++swapped_count;
  }
  // Same seed → same pattern, in any processing order.
  for (auto it = samples.rbegin(); it != samples.rend(); ++it) {
    bool swapped = false;
    swap_snapshots(*it, tok, 99, 0.5, &swapped);
    EXPECT_EQ(swapped, pattern[it->id]);
  }
  EXPECT_GT(swapped_count, 20);
  EXPECT_LT(swapped_count, 80);
  // A different seed flips some outcomes.
  int differs = 0;
  for (const DatasetSample& s : samples) {
    bool swapped = false;
    swap_snapshots(s, tok, 100, 0.5, &swapped);
    if (swapped != pattern[s.id]) ++differs;
  }
  EXPECT_GT(differs, 0);
}

TEST(ReverseDiffTags, SwapsPolarityInPlace) {
  DatasetSample s = make_sample("a\nb\nc\n", "a\nx\ny\nc\n");  // 1 del, 2 adds
  Tokenizer tok = ws_tokenizer();
  EncodedInput e = encode_diff_tags(s, tok, 1);
  int adds = count_token(e, kAddTag), dels = count_token(e, kDelTag);
  ASSERT_EQ(adds, 2);
  ASSERT_EQ(dels, 1);
  EncodedInput rev = reverse_diff_tags(e);
  EXPECT_EQ(count_token(rev, kAddTag), dels);
  EXPECT_EQ(count_token(rev, kDelTag), adds);
  for (size_t i = 0; i < e.tokens.size(); ++i) {
    if (e.tokens[i] == kAddTag)
      EXPECT_EQ(rev.tokens[i], kDelTag);
    else if (e.tokens[i] == kDelTag)
      EXPECT_EQ(rev.tokens[i], kAddTag);
    else
      EXPECT_EQ(rev.tokens[i], e.tokens[i]);
  }
  EXPECT_EQ(reverse_diff_tags(rev), e);  // involution
}

TEST(ReverseDiffTags, TaglessSequenceUnchanged) {
  DatasetSample s = make_sample("a\nb\n", "a\nb\n");
  Tokenizer tok = ws_tokenizer();
  EncodedInput e = encode_diff_tags(s, tok, 2);
  EXPECT_EQ(reverse_diff_tags(e), e);
}

TEST(ReverseDiffTags, WrongEncodingRejected) {
  DatasetSample s = make_sample("a\n", "b\n");
  Tokenizer tok = ws_tokenizer();
  EXPECT_THROW(reverse_diff_tags(encode_after_only(s, tok)), DataError);
}

TEST(SwapBlocks, ForcedSwapExchangesSectionContents) {
  DatasetSample s = make_sample("a\ny\nb\n", "a\nx\nb\n");
  ASSERT_EQ(s.added_lines_local, std::vector<int>{2});   // x
  ASSERT_EQ(s.deleted_lines_local, std::vector<int>{2}); // y
  Tokenizer tok = ws_tokenizer();
  bool swapped = false;
  EncodedInput e = swap_blocks(s, tok, 5, 1.0, &swapped);
  EXPECT_TRUE(swapped);
  EXPECT_EQ(e.tokens, (std::vector<std::string>{kAddedHeader, "y", kDeletedHeader, "x"}));
  EncodedInput plain = swap_blocks(s, tok, 5, 0.0, nullptr);
  EXPECT_EQ(plain.tokens, (std::vector<std::string>{kAddedHeader, "x", kDeletedHeader, "y"}));
}

TEST(SwapBlocks, TokenMultisetPreserved) {
  Tokenizer tok = ws_tokenizer(1000000);
  for (const DatasetSample& s : random_samples(50, 4321)) {
    EncodedInput plain = encode_added_deleted(s, tok);
    EncodedInput swapped = swap_blocks(s, tok, 17, 1.0, nullptr);
    std::vector<std::string> a = plain.tokens, b = swapped.tokens;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    EXPECT_EQ(a, b);
  }
}

TEST(SwapSnapshotsMultiset, TokenMultisetPreservedWhenUntruncated) {
  Tokenizer tok = ws_tokenizer(1000000);
  for (const DatasetSample& s : random_samples(50, 8642)) {
    EncodedInput plain = encode_before_after(s, tok);
    EncodedInput swapped = swap_snapshots(s, tok, 17, 1.0, nullptr);
    std::vector<std::string> a = plain.tokens, b = swapped.tokens;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    EXPECT_EQ(a, b);
  }
}

TEST(PerturbWrapper, StampsProvenanceAndAppliesKind) {
  DatasetSample s = make_sample("a\nb\nc\n", "a\nx\nc\n");
  Tokenizer tok = ws_tokenizer();
  PerturbationConfig cfg;
  cfg.kind = Perturbation::ReversedDiffTags;
  cfg.phase = Phase::test;
  cfg.seed = 11;
  PerturbedInput p = perturb(s, tok, cfg);
  EXPECT_EQ(p.kind, Perturbation::ReversedDiffTags);
  EXPECT_EQ(p.phase, Phase::test);
  EXPECT_EQ(p.seed, 11u);
  EXPECT_TRUE(p.applied);
  EXPECT_EQ(p.input, reverse_diff_tags(encode_diff_tags(s, tok)));

  cfg.kind = Perturbation::SwappedSnapshots;
  cfg.phase = Phase::train;
  EXPECT_THROW(perturb(s, tok, cfg), ConfigError);
}

TEST(PerturbWrapper, JsonRoundTripAndGateOnRead) {
  DatasetSample s = make_sample("a\nb\n", "a\nx\nb\n");
  Tokenizer tok = ws_tokenizer();
  PerturbationConfig cfg;
  cfg.kind = Perturbation::SpuriousMarkers;
  cfg.phase = Phase::train;
  cfg.seed = 3;
  PerturbedInput p = perturb(s, tok, cfg);
  Json j = perturbed_to_json(p);
  PerturbedInput back = perturbed_from_json(j, "test");
  EXPECT_EQ(back.input, p.input);
  EXPECT_EQ(back.kind, p.kind);
  EXPECT_EQ(back.phase, p.phase);
  EXPECT_EQ(back.applied, p.applied);

  // A ledger claiming a test-only perturbation ran in training is rejected.
  j["perturbation"] = to_string(Perturbation::ReversedDiffTags);
  EXPECT_THROW(perturbed_from_json(j, "test"), DataError);
}

}  // namespace
