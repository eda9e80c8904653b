#ifndef SEMKEY_TOOLS_CLI_H_
#define SEMKEY_TOOLS_CLI_H_

// The `semkey` command line:
//
//   semkey score REF HYP        print the score breakdown of one pair as JSON
//   semkey evaluate CORPUS      write report.json / report.csv, print summary
//   semkey annotate INPUT       annotate one sentence per line
//   semkey baseline REF HYP     BLEU / VSM cosine of one pair
//
// Settings are layered flags > environment > config file > defaults. The
// environment supplies SEMKEY_ENDPOINT and SEMKEY_TOKEN; the config file
// (--config, TOML-style "key = value") accepts the long flag names.
//
// Exit status: 0 success, 1 input / annotation / I/O failure, 2 usage error.

#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "semkey/annotator.h"

namespace semkey::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct Environment {
  std::function<std::optional<std::string>(const std::string&)> getenv;
  std::function<std::shared_ptr<Transport>()> make_transport;
  Annotator::Sleeper sleeper;  // null: really sleep
};

// Process environment and the cpp-httplib transport.
Environment default_environment();

// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const Environment& env = default_environment());

}  // namespace semkey::cli

#endif  // SEMKEY_TOOLS_CLI_H_
