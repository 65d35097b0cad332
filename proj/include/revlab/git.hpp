#pragma once

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "revlab/errors.hpp"

namespace revlab {

struct CommandResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// fork/exec with an argv vector (no shell, no quoting pitfalls) and a poll
// pump so large stdin/stdout never deadlock on pipe buffers.
inline CommandResult run_command(const std::vector<std::string>& argv,
                                 const std::optional<std::filesystem::path>& cwd = std::nullopt,
                                 std::string_view stdin_data = {},
                                 const std::vector<std::pair<std::string, std::string>>& extra_env = {}) {
  if (argv.empty()) throw IoError("run_command: empty argv");
  int in_pipe[2];
  int out_pipe[2];
  int err_pipe[2];
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0 || pipe(err_pipe) != 0)
    throw IoError("run_command: pipe() failed");

  pid_t pid = fork();
  if (pid < 0) throw IoError("run_command: fork() failed");
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(err_pipe[1], STDERR_FILENO);
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1], err_pipe[0], err_pipe[1]})
      close(fd);
    if (cwd && chdir(cwd->c_str()) != 0) _exit(126);
    for (const auto& [k, v] : extra_env) setenv(k.c_str(), v.c_str(), 1);
    std::vector<char*> cargv;
    cargv.reserve(argv.size() + 1);
    for (const std::string& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);
    execvp(cargv[0], cargv.data());
    _exit(127);
  }

  close(in_pipe[0]);
  close(out_pipe[1]);
  close(err_pipe[1]);

  CommandResult result;
  size_t written = 0;
  bool stdin_open = true;
  if (stdin_data.empty()) {
    close(in_pipe[1]);
    stdin_open = false;
  }
  bool out_open = true;
  bool err_open = true;
  char buf[65536];
  while (stdin_open || out_open || err_open) {
    struct pollfd fds[3];
    int nfds = 0;
    int idx_in = -1, idx_out = -1, idx_err = -1;
    if (stdin_open) {
      idx_in = nfds;
      fds[nfds++] = {in_pipe[1], POLLOUT, 0};
    }
    if (out_open) {
      idx_out = nfds;
      fds[nfds++] = {out_pipe[0], POLLIN, 0};
    }
    if (err_open) {
      idx_err = nfds;
      fds[nfds++] = {err_pipe[0], POLLIN, 0};
    }
    if (poll(fds, static_cast<nfds_t>(nfds), -1) < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (idx_in >= 0 && (fds[idx_in].revents & (POLLOUT | POLLERR | POLLHUP))) {
      ssize_t n = write(in_pipe[1], stdin_data.data() + written,
                        std::min<size_t>(stdin_data.size() - written, sizeof(buf)));
      if (n <= 0) {
        close(in_pipe[1]);
        stdin_open = false;
      } else {
        written += static_cast<size_t>(n);
        if (written == stdin_data.size()) {
          close(in_pipe[1]);
          stdin_open = false;
        }
      }
    }
    if (idx_out >= 0 && (fds[idx_out].revents & (POLLIN | POLLERR | POLLHUP))) {
      ssize_t n = read(out_pipe[0], buf, sizeof(buf));
      if (n <= 0) {
        close(out_pipe[0]);
        out_open = false;
      } else {
        result.out.append(buf, static_cast<size_t>(n));
      }
    }
    if (idx_err >= 0 && (fds[idx_err].revents & (POLLIN | POLLERR | POLLHUP))) {
      ssize_t n = read(err_pipe[0], buf, sizeof(buf));
      if (n <= 0) {
        close(err_pipe[0]);
        err_open = false;
      } else {
        result.err.append(buf, static_cast<size_t>(n));
      }
    }
  }

  int status = 0;
  waitpid(pid, &status, 0);
  if (WIFEXITED(status))
    result.exit_code = WEXITSTATUS(status);
  else if (WIFSIGNALED(status))
    result.exit_code = 128 + WTERMSIG(status);
  return result;
}

struct CommitMeta {
  std::string repo_id;
  std::string hash;
  std::vector<std::string> parent_hashes;
  int64_t author_time = 0;
  int64_t commit_time = 0;
  std::string message;
  std::vector<std::string> touched_files;
  // Change status per touched file ('A' added, 'D' deleted, 'M' modified),
  // parallel to touched_files. Renames surface as A+D (--no-renames).
  std::vector<char> file_statuses;
};

// Read-only access to one on-disk repository via the git CLI, with memoized
// blob reads. Thread-safe for concurrent readers.
class GitRepo {
 public:
  explicit GitRepo(std::filesystem::path path) : path_(std::move(path)) {
    CommandResult r = git({"rev-parse", "--git-dir"});
    if (r.exit_code != 0)
      throw IoError("not a git repository: " + path_.string() + " (" + r.err + ")");
  }

  const std::filesystem::path& path() const { return path_; }

  std::string repo_id() const {
    std::filesystem::path p = path_.lexically_normal();
    std::string name = p.filename().string();
    if (name.empty() || name == ".") name = p.parent_path().filename().string();
    return name;
  }

  CommandResult git(std::vector<std::string> args, std::string_view stdin_data = {}) const {
    std::vector<std::string> argv = {"git", "-C", path_.string(), "-c", "core.quotepath=false"};
    for (std::string& a : args) argv.push_back(std::move(a));
    return run_command(argv, std::nullopt, stdin_data);
  }

  // Every commit reachable from any ref, with per-file change statuses.
  // Merge commits come back with an empty file list.
  std::vector<CommitMeta> log_all() const {
    CommandResult r = git({"log", "--all", "--no-renames", "--name-status",
                           "--pretty=format:%x1e%H%x1f%P%x1f%at%x1f%ct%x1f%B%x1f"});
    if (r.exit_code != 0) {
      if (count_refs() == 0) return {};  // repo exists but has no commits yet
      throw IoError("git log failed for " + path_.string() + ": " + r.err);
    }
    std::vector<CommitMeta> commits;
    std::string_view out = r.out;
    size_t pos = 0;
    std::string id = repo_id();
    while (pos < out.size()) {
      size_t rec_end = out.find('\x1e', pos + 1);
      if (out[pos] != '\x1e') {
        pos = rec_end == std::string_view::npos ? out.size() : rec_end;
        continue;
      }
      std::string_view rec = out.substr(pos + 1, (rec_end == std::string_view::npos ? out.size() : rec_end) - pos - 1);
      pos = rec_end == std::string_view::npos ? out.size() : rec_end;

      std::vector<std::string_view> fields;
      size_t fpos = 0;
      for (int i = 0; i < 5 && fpos <= rec.size(); ++i) {
        size_t sep = rec.find('\x1f', fpos);
        if (sep == std::string_view::npos) {
          fields.push_back(rec.substr(fpos));
          fpos = rec.size() + 1;
        } else {
          fields.push_back(rec.substr(fpos, sep - fpos));
          fpos = sep + 1;
        }
      }
      if (fields.size() < 5) continue;
      CommitMeta meta;
      meta.repo_id = id;
      meta.hash = std::string(fields[0]);
      for (std::string_view p : split_ws(fields[1])) meta.parent_hashes.emplace_back(p);
      meta.author_time = to_int64(fields[2]);
      meta.commit_time = to_int64(fields[3]);
      meta.message = std::string(fields[4]);
      std::string_view files_blob = fpos <= rec.size() ? rec.substr(fpos) : std::string_view{};
      size_t lpos = 0;
      while (lpos < files_blob.size()) {
        size_t nl = files_blob.find('\n', lpos);
        std::string_view line = files_blob.substr(lpos, nl == std::string_view::npos ? nl : nl - lpos);
        lpos = nl == std::string_view::npos ? files_blob.size() : nl + 1;
        if (line.empty()) continue;
        size_t tab = line.find('\t');
        if (tab == std::string_view::npos) continue;
        meta.file_statuses.push_back(line[0]);
        meta.touched_files.emplace_back(line.substr(tab + 1));
      }
      commits.push_back(std::move(meta));
    }
    return commits;
  }

  // Raw blob content of file at rev; nullopt when the path does not exist
  // in that revision.
  std::optional<std::string> read_file(const std::string& rev, const std::string& file) const {
    std::pair<std::string, std::string> key{rev, file};
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    CommandResult r = git({"cat-file", "blob", rev + ":" + file});
    std::optional<std::string> content;
    if (r.exit_code == 0) content = std::move(r.out);
    std::lock_guard<std::mutex> lock(mutex_);
    auto [it, inserted] = cache_.emplace(key, std::move(content));
    return it->second;
  }

 private:
  int count_refs() const {
    CommandResult r = git({"for-each-ref", "--format=%(refname)"});
    if (r.exit_code != 0) return -1;
    return static_cast<int>(std::count(r.out.begin(), r.out.end(), '\n'));
  }

  static std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> parts;
    size_t i = 0;
    while (i < s.size()) {
      while (i < s.size() && s[i] == ' ') ++i;
      size_t j = i;
      while (j < s.size() && s[j] != ' ') ++j;
      if (j > i) parts.push_back(s.substr(i, j - i));
      i = j;
    }
    return parts;
  }

  static int64_t to_int64(std::string_view s) {
    int64_t v = 0;
    bool neg = false;
    size_t i = 0;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) neg = s[i++] == '-';
    for (; i < s.size() && s[i] >= '0' && s[i] <= '9'; ++i) v = v * 10 + (s[i] - '0');
    return neg ? -v : v;
  }

  std::filesystem::path path_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<std::string, std::string>, std::optional<std::string>> cache_;
};

// Non-merge commits, commit-time ascending with hash tiebreak; optionally
// restricted to commit_time >= since.
inline std::vector<CommitMeta> scan_commits(const GitRepo& repo,
                                            std::optional<int64_t> since = std::nullopt) {
  std::vector<CommitMeta> commits = repo.log_all();
  std::vector<CommitMeta> out;
  out.reserve(commits.size());
  for (CommitMeta& c : commits) {
    if (c.parent_hashes.size() >= 2) continue;
    if (since && c.commit_time < *since) continue;
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const CommitMeta& a, const CommitMeta& b) {
    if (a.commit_time != b.commit_time) return a.commit_time < b.commit_time;
    return a.hash < b.hash;
  });
  return out;
}

}  // namespace revlab
