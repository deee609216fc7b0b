#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "commands.hpp"

namespace {

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr);
  std::ostringstream out;
  for (unsigned int i = 0; i < length; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schur multiplier norms, factorizations and double operator integrals"};
  app.require_subcommand(1, 1);

  shm::cli::CommandOptions options;
  std::string file;
  const std::pair<const char*, const char*> commands[] = {
      {"mnorm", "bracket the Schur multiplier norm"},
      {"factorize", "bracket the norm and print the factorization X, Y"},
      {"doi", "double operator integral of a symbol on two spectral measures"},
      {"discretize", "coarsen a step symbol or kernel within an L2 budget"},
      {"verify-isometry", "compare the spectral transformer norm with the multiplier norm"},
  };
  for (const auto& [name, description] : commands) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("file", file, "problem file (JSON)")->required();
    sub->add_option("--rel-tol", options.rel_tol, "relative width of the norm bracket")->capture_default_str();
    sub->add_option("--seed", options.seed, "seed for all randomized components")->capture_default_str();
    sub->add_option("--restarts", options.restarts, "oracle restarts")->capture_default_str();
    sub->add_option("--epsilon", options.epsilon, "L2 budget for discretize")->capture_default_str();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : shm::cli::kParseError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  std::ifstream in(file, std::ios::binary);
  if (!in) {
    std::cerr << "shm: cannot read " << file << "\n";
    return shm::cli::kParseError;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  const auto start = std::chrono::steady_clock::now();
  shm::cli::CommandResult result;
  try {
    result = shm::cli::run_command(command, text, options, sha256_hex(text));
  } catch (const shm::cli::ParseError& e) {
    std::cerr << "shm: " << e.what() << "\n";
    return shm::cli::kParseError;
  }
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

  std::cout << result.report.dump(2) << "\n";
  std::cerr << "shm " << command << ": " << std::fixed << std::setprecision(3) << elapsed.count()
            << " s wall, exit " << result.exit_code << "\n";
  return result.exit_code;
}
