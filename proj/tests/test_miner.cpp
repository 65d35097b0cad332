#include <gtest/gtest.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "revlab/clean_screener.hpp"
#include "revlab/git.hpp"
#include "revlab/repo_miner.hpp"
#include "support/repo_fixture.hpp"

namespace revlab {
namespace {

using testsupport::RepoFixture;

constexpr int64_t kBase = 1600000000;
constexpr int64_t kDay = 86400;

const char* kAlphaV1 =
    "int alpha(int x) {\n"
    "  return x + 1;\n"
    "}\n";
const char* kAlphaV2 =
    "int alpha(int x) {\n"
    "  return x + 2;\n"
    "}\n";

// ------------------------------------------------------------------ scan ---

TEST(ScanCommits, EmptyRepositoryYieldsEmptyStream) {
  RepoFixture repo;
  GitRepo git(repo.path());
  EXPECT_TRUE(scan_commits(git).empty());
}

TEST(ScanCommits, LinearCommitsInTimeOrder) {
  RepoFixture repo;
  std::string h1 = repo.commit("one", kBase, {{"a.c", kAlphaV1}});
  std::string h2 = repo.commit("two", kBase + kDay, {{"a.c", kAlphaV2}});
  std::string h3 = repo.commit("three", kBase + 2 * kDay, {{"b.c", "int beta(void) { return 0; }\n"}});
  GitRepo git(repo.path());
  std::vector<CommitMeta> commits = scan_commits(git);
  ASSERT_EQ(commits.size(), 3u);
  EXPECT_EQ(commits[0].hash, h1);
  EXPECT_EQ(commits[1].hash, h2);
  EXPECT_EQ(commits[2].hash, h3);
  EXPECT_EQ(commits[0].commit_time, kBase);
  EXPECT_TRUE(commits[0].parent_hashes.empty());
  EXPECT_EQ(commits[1].parent_hashes, (std::vector<std::string>{h1}));
  EXPECT_EQ(commits[2].touched_files, (std::vector<std::string>{"b.c"}));
  EXPECT_EQ(commits[2].file_statuses, (std::vector<char>{'A'}));
}

TEST(ScanCommits, MergeCommitsExcluded) {
  RepoFixture repo;
  std::string h1 = repo.commit("root", kBase, {{"a.c", kAlphaV1}});
  repo.branch("side", "master");
  std::string h2 = repo.commit("side edit", kBase + kDay, {{"b.c", "int beta(void) { return 0; }\n"}});
  repo.checkout("master");
  std::string h3 = repo.commit("main edit", kBase + 2 * kDay, {{"a.c", kAlphaV2}});
  repo.merge("side", "merge side", kBase + 3 * kDay);
  GitRepo git(repo.path());
  ASSERT_EQ(git.log_all().size(), 4u);
  std::vector<CommitMeta> commits = scan_commits(git);
  ASSERT_EQ(commits.size(), 3u);
  for (const CommitMeta& c : commits) EXPECT_LT(c.parent_hashes.size(), 2u);
}

TEST(ScanCommits, SinceFilterDropsOlderCommits) {
  RepoFixture repo;
  repo.commit("old", kBase, {{"a.c", kAlphaV1}});
  std::string h2 = repo.commit("new", kBase + 10 * kDay, {{"a.c", kAlphaV2}});
  GitRepo git(repo.path());
  std::vector<CommitMeta> commits = scan_commits(git, kBase + 5 * kDay);
  ASSERT_EQ(commits.size(), 1u);
  EXPECT_EQ(commits[0].hash, h2);
}

TEST(ScanCommits, NotARepositoryThrows) {
  EXPECT_THROW(GitRepo("/tmp/definitely_not_a_repo_revlab"), IoError);
}

// --------------------------------------------------------------- reverts ---

CommitMeta make_commit(const std::string& hash, int64_t time, const std::string& message) {
  CommitMeta c;
  c.repo_id = "synthetic";
  c.hash = hash;
  c.commit_time = time;
  c.author_time = time;
  c.message = message;
  return c;
}

std::string fake_hash(char lead, const std::string& tail7) {
  std::string h(40, lead);
  h.replace(0, tail7.size(), tail7);
  return h;
}

TEST(DetectReverts, FullHashResolves) {
  std::string target = fake_hash('0', "a1b2c3d");
  std::vector<CommitMeta> commits = {
      make_commit(target, 100, "fix parser"),
      make_commit(fake_hash('1', "beef000"), 200,
                  "Revert \"fix parser\"\n\nThis reverts commit " + target + "."),
  };
  RevertScan scan = detect_reverts(commits);
  ASSERT_EQ(scan.links.size(), 1u);
  EXPECT_EQ(scan.links[0].target_hash, target);
  EXPECT_EQ(scan.links[0].match_kind, MatchKind::full_hash);
  EXPECT_EQ(scan.ambiguous, 0);
  EXPECT_EQ(scan.unresolved, 0);
}

TEST(DetectReverts, KeywordWithoutHexRunIsNoLink) {
  std::vector<CommitMeta> commits = {
      make_commit(fake_hash('0', "1111111"), 100, "base"),
      make_commit(fake_hash('2', "2222222"), 200, "revert to old behavior"),
  };
  RevertScan scan = detect_reverts(commits);
  EXPECT_TRUE(scan.links.empty());
  EXPECT_EQ(scan.ambiguous, 0);
  EXPECT_EQ(scan.unresolved, 0);
}

TEST(DetectReverts, AmbiguousPrefixCountedNotLinked) {
  std::vector<CommitMeta> commits = {
      make_commit("abcdef1" + std::string(33, '0'), 100, "first"),
      make_commit("abcdef1" + std::string(33, '1'), 150, "second"),
      make_commit(fake_hash('9', "fee1bad"), 300, "Revert of abcdef1 due to crashes"),
  };
  RevertScan scan = detect_reverts(commits);
  EXPECT_TRUE(scan.links.empty());
  EXPECT_EQ(scan.ambiguous, 1);
  EXPECT_EQ(scan.unresolved, 0);
}

TEST(DetectReverts, AbbreviatedPrefixResolvesUniquely) {
  std::string target = "abcdef1" + std::string(33, '0');
  std::vector<CommitMeta> commits = {
      make_commit(target, 100, "first"),
      make_commit(fake_hash('9', "fee1bad"), 300, "Revert abcdef1 because of crashes"),
  };
  RevertScan scan = detect_reverts(commits);
  ASSERT_EQ(scan.links.size(), 1u);
  EXPECT_EQ(scan.links[0].target_hash, target);
  EXPECT_EQ(scan.links[0].match_kind, MatchKind::abbreviated_hash);
}

TEST(DetectReverts, UnresolvableHexRunTallied) {
  std::vector<CommitMeta> commits = {
      make_commit(fake_hash('0', "1111111"), 100, "base"),
      make_commit(fake_hash('2', "2222222"), 200, "Revert commit 9999999 which broke things"),
  };
  RevertScan scan = detect_reverts(commits);
  EXPECT_TRUE(scan.links.empty());
  EXPECT_EQ(scan.unresolved, 1);
}

TEST(DetectReverts, TargetMustBeStrictlyEarlier) {
  std::string later = fake_hash('0', "aaaaaaa");
  std::vector<CommitMeta> commits = {
      make_commit(fake_hash('2', "ccccccc"), 100, "Revert " + later + " preemptively"),
      make_commit(later, 200, "lands after the revert"),
  };
  RevertScan scan = detect_reverts(commits);
  EXPECT_TRUE(scan.links.empty());
  EXPECT_EQ(scan.unresolved, 1);
}

TEST(DetectReverts, CaseInsensitiveKeywordAndHex) {
  std::string target = "ABCDEF9" + std::string(33, '0');
  std::vector<CommitMeta> commits = {
      make_commit(to_lower(target), 100, "base"),
      make_commit(fake_hash('1', "1234567"), 200, "REVERTED: ABCDEF9 was wrong"),
  };
  RevertScan scan = detect_reverts(commits);
  ASSERT_EQ(scan.links.size(), 1u);
  EXPECT_EQ(scan.links[0].target_hash, to_lower(target));
}

TEST(DetectReverts, FirstResolvableRunWinsAndYieldsOneLink) {
  std::string t1 = fake_hash('0', "1111111");
  std::string t2 = fake_hash('3', "3333333");
  std::vector<CommitMeta> commits = {
      make_commit(t1, 100, "one"),
      make_commit(t2, 150, "two"),
      make_commit(fake_hash('9', "fffffff"), 300, "Revert 1111111 and also mentions 3333333"),
  };
  RevertScan scan = detect_reverts(commits);
  ASSERT_EQ(scan.links.size(), 1u);
  EXPECT_EQ(scan.links[0].target_hash, t1);
}

TEST(DetectReverts, SixCharRunTooShort) {
  std::vector<CommitMeta> commits = {
      make_commit(fake_hash('0', "abcdef0"), 100, "base"),
      make_commit(fake_hash('1', "1111111"), 200, "Revert abcdef (too short to cite)"),
  };
  RevertScan scan = detect_reverts(commits);
  EXPECT_TRUE(scan.links.empty());
  EXPECT_EQ(scan.unresolved, 0);  // no qualifying hex run at all
}

// ---------------------------------------------------------------- filter ---

struct MinedRepo {
  RepoFixture repo;
  MineConfig cfg;

  MiningResult mine() {
    GitRepo git(repo.path());
    return mine_repository(git, cfg);
  }
};

TEST(FilterSingleFunction, TwoFileCommitRejected) {
  MinedRepo m;
  m.repo.commit("root", kBase, {{"a.c", kAlphaV1}, {"b.c", "int beta(void) { return 0; }\n"}});
  m.repo.commit("edit both", kBase + kDay,
                {{"a.c", kAlphaV2}, {"b.c", "int beta(void) { return 1; }\n"}});
  MiningResult r = m.mine();
  EXPECT_EQ(r.stats.candidates, 0);
  EXPECT_EQ(r.stats.rejections.at("multi-file"), 1);
}

TEST(FilterSingleFunction, OneLineEditInsideFunctionAccepted) {
  MinedRepo m;
  m.repo.commit("root", kBase, {{"a.c", kAlphaV1}});
  std::string h = m.repo.commit("tweak alpha", kBase + kDay, {{"a.c", kAlphaV2}});
  MiningResult r = m.mine();
  ASSERT_EQ(r.candidates.size(), 1u);
  const CandidateRef& cand = r.candidates[0];
  EXPECT_EQ(cand.meta.hash, h);
  EXPECT_EQ(cand.mod.function_name, "alpha");
  EXPECT_EQ(cand.mod.file, "a.c");
  EXPECT_EQ(cand.mod.commit_message, "tweak alpha\n");
  EXPECT_EQ(cand.mod.deleted_lines_local, (std::vector<int>{2}));
  EXPECT_EQ(cand.mod.added_lines_local, (std::vector<int>{2}));
}

TEST(FilterSingleFunction, EditsInTwoFunctionsRejected) {
  MinedRepo m;
  std::string v1 =
      "int f(void) {\n  return 1;\n}\n"
      "int g(void) {\n  return 2;\n}\n";
  std::string v2 =
      "int f(void) {\n  return 10;\n}\n"
      "int g(void) {\n  return 20;\n}\n";
  m.repo.commit("root", kBase, {{"a.c", v1}});
  m.repo.commit("edit f and g", kBase + kDay, {{"a.c", v2}});
  MiningResult r = m.mine();
  EXPECT_EQ(r.stats.candidates, 0);
  EXPECT_EQ(r.stats.rejections.at("multi-function"), 1);
}

TEST(FilterSingleFunction, NonSourceExtensionRejected) {
  MinedRepo m;
  m.repo.commit("root", kBase, {{"README.md", "hello\n"}});
  m.repo.commit("edit docs", kBase + kDay, {{"README.md", "hello world\n"}});
  MiningResult r = m.mine();
  EXPECT_EQ(r.stats.candidates, 0);
  EXPECT_EQ(r.stats.rejections.at("extension"), 1);
}

TEST(FilterSingleFunction, AddedAndDeletedFilesRejected) {
  MinedRepo m;
  m.repo.commit("root", kBase, {{"a.c", kAlphaV1}});
  m.repo.commit("add file", kBase + kDay, {{"b.c", "int beta(void) { return 0; }\n"}});
  m.repo.commit("drop file", kBase + 2 * kDay, {{"b.c", std::nullopt}});
  MiningResult r = m.mine();
  EXPECT_EQ(r.stats.candidates, 0);
  EXPECT_EQ(r.stats.rejections.at("file-added"), 1);
  EXPECT_EQ(r.stats.rejections.at("file-deleted"), 1);
}

TEST(FilterSingleFunction, BinaryFileRejected) {
  MinedRepo m;
  std::string v1 = std::string("BIN\0v1\n", 7);
  std::string v2 = std::string("BIN\0v2\n", 7);
  m.repo.commit("root", kBase, {{"blob.c", v1}});
  m.repo.commit("edit blob", kBase + kDay, {{"blob.c", v2}});
  MiningResult r = m.mine();
  EXPECT_EQ(r.stats.candidates, 0);
  EXPECT_EQ(r.stats.rejections.at("binary-file"), 1);
}

TEST(FilterSingleFunction, OversizedFileRejected) {
  MinedRepo m;
  m.cfg.max_file_bytes = 256;
  std::string big1 = "int pad(void) {\n  return 0;\n}\n" + std::string(400, '/') + "\n";
  std::string big2 = "int pad(void) {\n  return 1;\n}\n" + std::string(400, '/') + "\n";
  m.repo.commit("root", kBase, {{"big.c", big1}});
  m.repo.commit("edit big", kBase + kDay, {{"big.c", big2}});
  MiningResult r = m.mine();
  EXPECT_EQ(r.stats.candidates, 0);
  EXPECT_EQ(r.stats.rejections.at("file-too-large"), 1);
}

TEST(FilterSingleFunction, CommentOnlyEditOutsideFunctionRejected) {
  MinedRepo m;
  m.repo.commit("root", kBase, {{"a.c", std::string("/* v1 */\n") + kAlphaV1}});
  m.repo.commit("touch comment", kBase + kDay, {{"a.c", std::string("/* v2 */\n") + kAlphaV1}});
  MiningResult r = m.mine();
  EXPECT_EQ(r.stats.candidates, 0);
  EXPECT_EQ(r.stats.rejections.at("outside-function"), 1);
}

// ------------------------------------------------------------ end-to-end ---

TEST(MineRepository, QualifyingRevertProducesOneDefectiveCandidate) {
  MinedRepo m;
  m.repo.commit("root", kBase, {{"a.c", kAlphaV1}});
  std::string target = m.repo.commit("make alpha bigger", kBase + kDay, {{"a.c", kAlphaV2}});
  m.repo.commit("Revert \"make alpha bigger\"\n\nThis reverts commit " + target + ".",
                kBase + 2 * kDay, {{"a.c", kAlphaV1}});
  MiningResult r = m.mine();
  ASSERT_EQ(r.defective.size(), 1u);
  EXPECT_EQ(r.defective[0].link.target_hash, target);
  EXPECT_EQ(r.defective[0].link.match_kind, MatchKind::full_hash);
  EXPECT_EQ(r.defective[0].target.mod.function_name, "alpha");
  EXPECT_EQ(r.stats.revert_links, 1);
  EXPECT_EQ(r.stats.defective_candidates, 1);
}

TEST(MineRepository, RevertOfMultiFileTargetExcluded) {
  MinedRepo m;
  m.repo.commit("root", kBase, {{"a.c", kAlphaV1}, {"b.c", "int beta(void) { return 0; }\n"}});
  std::string target = m.repo.commit(
      "edit both", kBase + kDay,
      {{"a.c", kAlphaV2}, {"b.c", "int beta(void) { return 1; }\n"}});
  m.repo.commit("Revert \"edit both\"\n\nThis reverts commit " + target + ".", kBase + 2 * kDay,
                {{"a.c", kAlphaV1}, {"b.c", "int beta(void) { return 0; }\n"}});
  MiningResult r = m.mine();
  EXPECT_EQ(r.stats.revert_links, 1);
  EXPECT_TRUE(r.defective.empty());
}

TEST(MineRepository, TwoRevertsSameTargetDeduplicatedKeepingEarliest) {
  MinedRepo m;
  m.repo.commit("root", kBase, {{"a.c", kAlphaV1}});
  std::string target = m.repo.commit("tweak", kBase + kDay, {{"a.c", kAlphaV2}});
  std::string r1 = m.repo.commit("Revert bad tweak " + target, kBase + 2 * kDay, {{"a.c", kAlphaV1}});
  std::string r2 =
      m.repo.commit("Revert again, still " + target, kBase + 3 * kDay, {{"a.c", kAlphaV2}});
  MiningResult r = m.mine();
  ASSERT_EQ(r.defective.size(), 1u);
  EXPECT_EQ(r.defective[0].link.revert_hash, r1);
  EXPECT_EQ(r.stats.revert_links, 1);
}

TEST(MineRepository, RejectionTalliesPartitionSingleParentCommits) {
  MinedRepo m;
  m.repo.commit("root", kBase, {{"a.c", kAlphaV1}});
  m.repo.commit("good edit", kBase + kDay, {{"a.c", kAlphaV2}});
  m.repo.commit("two files", kBase + 2 * kDay,
                {{"a.c", kAlphaV1}, {"b.c", "int beta(void) { return 0; }\n"}});
  m.repo.commit("doc edit", kBase + 3 * kDay, {{"notes.txt", "hi\n"}});
  m.repo.commit("add file", kBase + 4 * kDay, {{"c.c", "int gamma(void) { return 0; }\n"}});
  MiningResult r = m.mine();
  int64_t tallied = r.stats.candidates;
  for (const auto& [reason, count] : r.stats.rejections) tallied += count;
  EXPECT_EQ(tallied, r.stats.single_parent_commits);
  EXPECT_EQ(r.stats.single_parent_commits, 4);
  EXPECT_EQ(r.stats.scanned_commits, 5);
}

TEST(MineRepository, DeterministicAcrossRuns) {
  MinedRepo m;
  m.repo.commit("root", kBase, {{"a.c", kAlphaV1}});
  std::string target = m.repo.commit("tweak", kBase + kDay, {{"a.c", kAlphaV2}});
  m.repo.commit("Revert " + target, kBase + 2 * kDay, {{"a.c", kAlphaV1}});
  MiningResult r1 = m.mine();
  MiningResult r2 = m.mine();
  ASSERT_EQ(r1.candidates.size(), r2.candidates.size());
  for (size_t i = 0; i < r1.candidates.size(); ++i) {
    EXPECT_EQ(r1.candidates[i].meta.hash, r2.candidates[i].meta.hash);
    EXPECT_EQ(r1.candidates[i].mod.function_before, r2.candidates[i].mod.function_before);
    EXPECT_EQ(r1.candidates[i].mod.function_after, r2.candidates[i].mod.function_after);
  }
  ASSERT_EQ(r1.links.size(), r2.links.size());
  for (size_t i = 0; i < r1.links.size(); ++i)
    EXPECT_EQ(r1.links[i].target_hash, r2.links[i].target_hash);
}

// -------------------------------------------------------------- screener ---

struct ScreenRepo {
  RepoFixture repo;
  MineConfig mine_cfg;
  ScreenConfig cfg;

  MiningResult mined;
  std::optional<GitRepo> git;

  void mine() {
    git.emplace(repo.path());
    mined = mine_repository(*git, mine_cfg);
  }

  const CandidateRef& candidate_for(const std::string& hash) {
    for (const CandidateRef& c : mined.candidates)
      if (c.meta.hash == hash) return c;
    throw std::runtime_error("no candidate for " + hash);
  }
};

TEST(CleanPool, NoDefectiveAnchorsGivesEmptyPool) {
  ScreenRepo s;
  s.repo.commit("root", kBase, {{"a.c", kAlphaV1}});
  s.repo.commit("edit", kBase + kDay, {{"a.c", kAlphaV2}});
  s.mine();
  EXPECT_TRUE(select_clean_pool(s.mined, {}, s.cfg).empty());
}

TEST(CleanPool, WindowMembership) {
  ScreenRepo s;
  s.repo.commit("root", kBase, {{"a.c", kAlphaV1}});
  std::string near = s.repo.commit("near edit", kBase + 10 * kDay, {{"a.c", kAlphaV2}});
  std::string far = s.repo.commit("far edit", kBase + 200 * kDay, {{"a.c", kAlphaV1}});
  s.mine();
  std::vector<CandidateRef> pool = select_clean_pool(s.mined, {kBase}, s.cfg);
  ASSERT_EQ(pool.size(), 1u);
  EXPECT_EQ(pool[0].meta.hash, near);
}

TEST(CleanPool, RevertCommitsAndTargetsExcluded) {
  ScreenRepo s;
  s.repo.commit("root", kBase, {{"a.c", kAlphaV1}});
  std::string target = s.repo.commit("tweak", kBase + kDay, {{"a.c", kAlphaV2}});
  std::string rev = s.repo.commit("Revert " + target, kBase + 2 * kDay, {{"a.c", kAlphaV1}});
  std::string ok = s.repo.commit("harmless", kBase + 3 * kDay, {{"a.c", kAlphaV2}});
  s.mine();
  std::vector<CandidateRef> pool = select_clean_pool(s.mined, {kBase + kDay}, s.cfg);
  ASSERT_EQ(pool.size(), 1u);
  EXPECT_EQ(pool[0].meta.hash, ok);
}

TEST(HistoryScreen, KeywordInLaterTouchFails) {
  ScreenRepo s;
  s.repo.commit("root", kBase, {{"a.c", kAlphaV1}});
  std::string cand = s.repo.commit("candidate edit", kBase + kDay, {{"a.c", kAlphaV2}});
  s.repo.commit("fix bug in parser", kBase + 2 * kDay, {{"a.c", kAlphaV1}});
  s.mine();
  ScreenOutcome out = history_screen(*s.git, s.mined.commits, s.candidate_for(cand), s.cfg);
  EXPECT_EQ(out.status, ScreenStatus::keyword_hit);
  EXPECT_EQ(out.matched_keywords, (std::vector<std::string>{"fix bug"}));
}

TEST(HistoryScreen, NeverTouchedAgainFails) {
  ScreenRepo s;
  s.repo.commit("root", kBase, {{"a.c", kAlphaV1}});
  std::string cand = s.repo.commit("candidate edit", kBase + kDay, {{"a.c", kAlphaV2}});
  s.repo.commit("other file", kBase + 2 * kDay, {{"b.c", "int beta(void) { return 0; }\n"}});
  s.mine();
  ScreenOutcome out = history_screen(*s.git, s.mined.commits, s.candidate_for(cand), s.cfg);
  EXPECT_EQ(out.status, ScreenStatus::never_modified);
  EXPECT_EQ(out.inspected, 0);
}

TEST(HistoryScreen, BenignLaterTouchesPass) {
  ScreenRepo s;
  s.repo.commit("root", kBase, {{"a.c", kAlphaV1}});
  std::string cand = s.repo.commit("candidate edit", kBase + kDay, {{"a.c", kAlphaV2}});
  s.repo.commit("optimize", kBase + 2 * kDay,
                {{"a.c", "int alpha(int x) {\n  return x + 3;\n}\n"}});
  s.repo.commit("add feature", kBase + 3 * kDay,
                {{"a.c", "int alpha(int x) {\n  return x + 4;\n}\n"}});
  s.mine();
  ScreenOutcome out = history_screen(*s.git, s.mined.commits, s.candidate_for(cand), s.cfg);
  EXPECT_EQ(out.status, ScreenStatus::pass);
  EXPECT_EQ(out.inspected, 2);
}

TEST(HistoryScreen, TouchesToOtherFunctionsDoNotCount) {
  ScreenRepo s;
  std::string v1 = std::string(kAlphaV1) + "int beta(void) {\n  return 0;\n}\n";
  std::string v2 = std::string(kAlphaV2) + "int beta(void) {\n  return 0;\n}\n";
  std::string v3 = std::string(kAlphaV2) + "int beta(void) {\n  return 9;\n}\n";
  s.repo.commit("root", kBase, {{"a.c", v1}});
  std::string cand = s.repo.commit("candidate edit", kBase + kDay, {{"a.c", v2}});
  s.repo.commit("fix bug in beta", kBase + 2 * kDay, {{"a.c", v3}});
  s.mine();
  ScreenOutcome out = history_screen(*s.git, s.mined.commits, s.candidate_for(cand), s.cfg);
  // The only later touch hits beta, not alpha, so alpha counts as never
  // modified afterwards.
  EXPECT_EQ(out.status, ScreenStatus::never_modified);
}

TEST(HistoryScreen, LookaheadBoundsInspection) {
  ScreenRepo s;
  s.cfg.lookahead_commits = 2;
  s.repo.commit("root", kBase, {{"a.c", kAlphaV1}});
  std::string cand = s.repo.commit("candidate edit", kBase + kDay, {{"a.c", kAlphaV2}});
  s.repo.commit("benign one", kBase + 2 * kDay,
                {{"a.c", "int alpha(int x) {\n  return x + 3;\n}\n"}});
  s.repo.commit("benign two", kBase + 3 * kDay,
                {{"a.c", "int alpha(int x) {\n  return x + 4;\n}\n"}});
  s.repo.commit("revert everything", kBase + 4 * kDay,
                {{"a.c", "int alpha(int x) {\n  return x + 5;\n}\n"}});
  s.mine();
  ScreenOutcome out = history_screen(*s.git, s.mined.commits, s.candidate_for(cand), s.cfg);
  // The keyword commit is the third touch, beyond the lookahead of 2.
  EXPECT_EQ(out.status, ScreenStatus::pass);
  EXPECT_EQ(out.inspected, 2);
}

TEST(HistoryScreen, RenameStopsTracking) {
  ScreenRepo s;
  s.repo.commit("root", kBase, {{"a.c", kAlphaV1}});
  std::string cand = s.repo.commit("candidate edit", kBase + kDay, {{"a.c", kAlphaV2}});
  s.repo.commit("rename function", kBase + 2 * kDay,
                {{"a.c", "int alpha_renamed(int x) {\n  return x + 2;\n}\n"}});
  s.repo.commit("fix bug in renamed", kBase + 3 * kDay,
                {{"a.c", "int alpha_renamed(int x) {\n  return x + 9;\n}\n"}});
  s.mine();
  ScreenOutcome out = history_screen(*s.git, s.mined.commits, s.candidate_for(cand), s.cfg);
  // The rename commit deletes alpha's lines (counts as its last touch, no
  // keyword); afterwards the name is gone and tracking stops, so the later
  // keyword commit is never seen.
  EXPECT_EQ(out.status, ScreenStatus::pass);
  EXPECT_EQ(out.inspected, 1);
}

TEST(HistoryScreen, EnlargingKeywordsOnlyShrinksPassingSet) {
  ScreenRepo s;
  s.repo.commit("root", kBase, {{"a.c", kAlphaV1}});
  std::string c1 = s.repo.commit("edit one", kBase + kDay, {{"a.c", kAlphaV2}});
  s.repo.commit("optimize hot path", kBase + 2 * kDay,
                {{"a.c", "int alpha(int x) {\n  return x + 3;\n}\n"}});
  std::string c2 = s.repo.commit("edit two", kBase + 3 * kDay,
                                 {{"a.c", "int alpha(int x) {\n  return x + 4;\n}\n"}});
  s.repo.commit("cleanup pass", kBase + 4 * kDay,
                {{"a.c", "int alpha(int x) {\n  return x + 5;\n}\n"}});
  s.mine();

  ScreenConfig narrow = s.cfg;
  ScreenConfig wide = s.cfg;
  wide.problematic_keywords.push_back("optimize");
  wide.problematic_keywords.push_back("cleanup");
  int narrow_pass = 0;
  int wide_pass = 0;
  for (const std::string& hash : {c1, c2}) {
    const CandidateRef& cand = s.candidate_for(hash);
    if (history_screen(*s.git, s.mined.commits, cand, narrow).status == ScreenStatus::pass)
      ++narrow_pass;
    if (history_screen(*s.git, s.mined.commits, cand, wide).status == ScreenStatus::pass)
      ++wide_pass;
  }
  EXPECT_EQ(narrow_pass, 2);
  EXPECT_EQ(wide_pass, 0);
  EXPECT_LE(wide_pass, narrow_pass);
}

TEST(ScreenConfig, ZeroLookaheadRejected) {
  ScreenConfig cfg;
  cfg.lookahead_commits = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.lookahead_commits = 5;
  cfg.problematic_keywords.clear();
  EXPECT_THROW(cfg.validate(), ConfigError);
}

}  // namespace
}  // namespace revlab
