#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "mdskit/mdsgen.hpp"
#include "mdskit/mdsverify.hpp"
#include "mdskit/rng.hpp"
#include "mdskit/securesum.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open " + tmp.string() + " for writing");
    }
    out << content;
    if (!out) {
      throw IoError("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    throw IoError("rename to " + path + " failed: " + ec.message());
  }
}

nlohmann::ordered_json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path);
  }
  // json::parse_error carries the byte offset; it maps to the I/O exit code.
  return nlohmann::ordered_json::parse(in);
}

std::string rate_string(const mdskit::Rational& r) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", r.to_double());
  return r.to_string() + " (" + buf + ")";
}

std::string subset_string(const std::vector<int>& users) {
  std::string s = "{";
  for (std::size_t i = 0; i < users.size(); ++i) {
    if (i > 0) s += ",";
    s += std::to_string(users[i]);
  }
  return s + "}";
}

void print_report_summary(const std::string& name,
                          const mdskit::VerifyReport& report) {
  std::size_t passed = 0;
  for (const auto& c : report.checks) {
    if (c.pass) ++passed;
  }
  std::cout << name << ": " << passed << "/" << report.checks.size()
            << " checks pass\n";
  for (const auto& c : report.checks) {
    if (!c.pass) {
      std::cout << "  FAIL " << c.label << ": " << c.lhs.to_string() << " "
                << (c.relation == mdskit::Relation::kEqual ? "!=" : "<") << " "
                << c.rhs.to_string() << "\n";
    }
  }
}

mdskit::MdsParams params_from_flags(int k, std::uint64_t q,
                                    const std::vector<int>& levels,
                                    std::int64_t block) {
  mdskit::MdsParams params;
  params.K = k;
  params.q = q;
  if (levels.empty()) {
    for (int n = 1; n <= k; ++n) params.levels.push_back(n);
  } else {
    params.levels = levels;
  }
  if (block > 0) {
    params.block = block;
  } else {
    params.block = mdskit::factorial(params.max_level());
  }
  params.validate();
  return params;
}

int cmd_gen(int k, std::uint64_t q, std::uint64_t seed,
            const std::vector<int>& levels, std::int64_t block,
            int max_attempts, const std::string& out) {
  const mdskit::MdsParams params = params_from_flags(k, q, levels, block);
  const mdskit::MdsScheme scheme =
      mdskit::sample_scheme(params, seed, max_attempts);
  const auto conditions = mdskit::condition_matrices(scheme);

  std::cout << "generated scheme: K=" << params.K << " q=" << params.q
            << " block=" << params.block << " levels=[1.."
            << params.max_level() << "] seed=" << seed << "\n";
  std::cout << "certified: " << conditions.size()
            << " condition matrices full rank\n";
  std::cout << "rate: " << rate_string(mdskit::scheme_rate(scheme)) << "\n";
  if (params.max_level() == params.K) {
    std::cout << "optimal rate: "
              << rate_string(mdskit::optimal_rate(params.K)) << "\n";
  }
  if (!out.empty()) {
    write_file_atomic(out, mdskit::scheme_to_json(scheme).dump(2) + "\n");
    std::cout << "scheme written to " << out << "\n";
  }
  return kExitPass;
}

int cmd_verify(const std::string& in, bool use_vandermonde, int k,
               std::uint64_t q, int subset_cap, std::uint64_t sweep_seed,
               const std::string& out) {
  mdskit::SweepOptions sweep;
  if (subset_cap > 0) sweep.subset_cap = subset_cap;
  sweep.seed = sweep_seed;

  mdskit::VerifyReport report;
  bool certified = true;

  mdskit::MdsVariables vars;
  if (use_vandermonde) {
    vars = mdskit::vandermonde_baseline(k, q);
    std::cout << "vandermonde baseline: K=" << k << " q=" << q << "\n";
    std::cout << "rate: " << rate_string(mdskit::variables_rate(vars)) << "\n";
  } else {
    if (in.empty()) {
      throw std::invalid_argument("verify: need --in FILE or --vandermonde");
    }
    const mdskit::MdsScheme scheme =
        mdskit::scheme_from_json(read_json_file(in));
    std::cout << "loaded scheme: K=" << scheme.params.K
              << " q=" << scheme.params.q << " block=" << scheme.params.block
              << "\n";
    if (auto failure = mdskit::first_singular_condition(scheme)) {
      certified = false;
      std::cout << "certification FAILED at " << *failure << "\n";
      report.add_equal("certification[" + *failure + "]", mdskit::Rational(0),
                       mdskit::Rational(1));
    } else {
      std::cout << "certification: all "
                << mdskit::condition_matrices(scheme).size()
                << " condition matrices full rank\n";
    }
    vars = mdskit::derive_variables(scheme);
    std::cout << "rate: " << rate_string(mdskit::scheme_rate(scheme)) << "\n";
  }

  report.merge(mdskit::verify_mds_all_levels(vars, sweep));
  report.merge(mdskit::verify_derivability(vars));
  report.merge(mdskit::absorption_battery(vars, sweep));
  report.merge(mdskit::harmonic_battery(vars, sweep));

  print_report_summary("verification", report);
  if (!out.empty()) {
    write_file_atomic(out, report.to_json().dump(2) + "\n");
    std::cout << "report written to " << out << "\n";
  }
  return (report.overall() && certified) ? kExitPass : kExitCheckFailure;
}

int cmd_sum_demo(int k, std::uint64_t q, std::uint64_t seed, bool table2,
                 bool fresh_keys, int subset_cap, int max_attempts,
                 const std::string& out, const std::string& keys_out) {
  using nlohmann::ordered_json;
  ordered_json transcript;
  transcript["format"] = "sum-transcript";
  transcript["version"] = 1;
  transcript["K"] = k;
  transcript["q"] = q;
  transcript["rng"] = mdskit::Xoshiro256::kAlgorithm;
  transcript["rng_seed"] = seed;
  transcript["table2"] = table2;

  // Input stream decoupled from the key-sampling stream.
  mdskit::Xoshiro256 input_rng(seed ^ 0x9e3779b97f4a7c15ull);
  const mdskit::PrimeField field(q);
  bool all_pass = true;
  ordered_json runs = ordered_json::array();

  const auto run_selection =
      [&](const std::vector<int>& users, std::int64_t input_len,
          const std::function<std::vector<std::uint64_t>(
              int, const std::vector<std::uint64_t>&)>& encode_fn,
          const mdskit::VerifyReport& security) {
        ordered_json run;
        run["U"] = users;
        ordered_json inputs_json, messages_json;
        std::map<int, std::vector<std::uint64_t>> messages;
        std::vector<std::uint64_t> expected(input_len, 0);
        for (int u : users) {
          std::vector<std::uint64_t> input(input_len);
          for (auto& v : input) v = input_rng.below(q);
          expected = mdskit::vec_add(expected, input, field);
          const auto msg = encode_fn(u, input);
          inputs_json[std::to_string(u)] = input;
          messages_json[std::to_string(u)] = msg;
          messages.emplace(u, msg);
        }
        run["inputs"] = inputs_json;
        run["messages"] = messages_json;
        const auto decoded = mdskit::decode(field, users, messages);
        run["decoded"] = decoded;
        const bool correct = decoded == expected;
        run["correct"] = correct;
        ordered_json checks = ordered_json::array();
        for (const auto& c : security.checks) {
          ordered_json jc;
          jc["label"] = c.label;
          jc["lhs"] = c.lhs.to_string();
          jc["rhs"] = c.rhs.to_string();
          jc["pass"] = c.pass;
          checks.push_back(jc);
        }
        run["checks"] = checks;
        const bool pass = correct && security.overall();
        all_pass = all_pass && pass;
        std::cout << "U=" << subset_string(users)
                  << (correct ? " decode ok" : " DECODE MISMATCH")
                  << (security.overall() ? ", leakage 0" : ", SECURITY FAIL")
                  << "\n";
        runs.push_back(run);
      };

  if (table2) {
    if (k != 3) {
      throw std::invalid_argument(
          "sum-demo: the table2 baseline is a 3-user scheme");
    }
    const mdskit::Table2Baseline baseline(q, seed);
    transcript["key_rate"] = baseline.key_rate().to_string();
    std::cout << "table2 baseline over GF(" << q << "): L=2, L_Z=3\n";
    for (const auto& users : mdskit::Table2Baseline::selectable_subsets()) {
      run_selection(
          users, baseline.input_len(),
          [&](int u, const std::vector<std::uint64_t>& input) {
            return baseline.encode(users, u, input);
          },
          baseline.security_check(users));
    }
    std::cout << "key rate: " << rate_string(baseline.key_rate()) << "\n";
  } else {
    const mdskit::SummationParams params{k, q};
    const mdskit::KeyMaterial keys = mdskit::setup(params, seed, max_attempts);
    transcript["key_rate"] = keys.key_rate().to_string();
    std::cout << "summation keys: K=" << k << " q=" << q
              << " input symbols=" << keys.input_len() << "\n";

    mdskit::SweepOptions sweep;
    if (subset_cap > 0) sweep.subset_cap = subset_cap;
    std::uint64_t run_index = 0;
    for (const auto& users : mdskit::sweep_subsets(k, sweep)) {
      if (users.size() < 2) continue;
      // The modeled problem reuses one key across selections; --fresh-keys
      // redraws the concrete seeds per run for experiments.
      const mdskit::KeyMaterial run_keys =
          fresh_keys ? mdskit::resample_keys(keys, seed + ++run_index) : keys;
      const mdskit::MaskSet masks = mdskit::mask_coefficients(run_keys, users);
      run_selection(
          users, run_keys.input_len(),
          [&](int u, const std::vector<std::uint64_t>& input) {
            return mdskit::encode(run_keys, masks, users, u, input);
          },
          mdskit::security_check(run_keys, users, masks));
    }
    std::cout << "key rate: " << rate_string(keys.key_rate())
              << ", optimal: " << rate_string(mdskit::harmonic_number(k - 1))
              << "\n";
    if (!keys_out.empty()) {
      write_file_atomic(keys_out, mdskit::keys_to_json(keys).dump(2) + "\n");
      std::cout << "keys written to " << keys_out << "\n";
    }
  }

  transcript["runs"] = runs;
  transcript["overall"] = all_pass;
  if (!out.empty()) {
    write_file_atomic(out, transcript.dump(2) + "\n");
    std::cout << "transcript written to " << out << "\n";
  }
  std::cout << (all_pass ? "all selections pass" : "FAILURES detected") << "\n";
  return all_pass ? kExitPass : kExitCheckFailure;
}

int cmd_bounds(int k, std::uint64_t q, std::uint64_t seed,
               const std::string& in, int max_attempts,
               const std::string& out) {
  std::cout << "harmonic numbers H_1..H_8:";
  for (int n = 1; n <= 8; ++n) {
    std::cout << " " << mdskit::harmonic_number(n).to_string();
  }
  std::cout << "\n";

  mdskit::MdsScheme scheme =
      in.empty() ? mdskit::sample_scheme(mdskit::MdsParams::standard(k, q),
                                         seed, max_attempts)
                 : mdskit::scheme_from_json(read_json_file(in));
  if (!in.empty()) {
    if (auto failure = mdskit::first_singular_condition(scheme)) {
      std::cout << "certification FAILED at " << *failure << "\n";
      return kExitCheckFailure;
    }
  }
  const int K = scheme.params.K;

  mdskit::VerifyReport report;
  const mdskit::MdsVariables vars = mdskit::derive_variables(scheme);
  const mdskit::Rational achieved = mdskit::scheme_rate(scheme);
  const mdskit::Rational target = mdskit::optimal_rate(K);
  std::cout << "variable generation: achieved rate " << rate_string(achieved)
            << ", optimal " << rate_string(target) << "\n";
  if (scheme.params.max_level() == K) {
    report.add_equal("rate-matches-optimal[K=" + std::to_string(K) + "]",
                     achieved, target);
  }

  // Identity battery on the generated variables.
  std::vector<mdskit::LinearRV> chain_vars;
  for (int user = 1; user <= K; ++user) {
    for (int n : vars.levels) chain_vars.push_back(vars.z(user, n));
  }
  if (chain_vars.size() >= 2) {
    const auto chain = mdskit::check_chain_identity(chain_vars);
    report.add_equal("chain-identity[all-variables]", chain.lhs, chain.rhs);
  }

  report.merge(mdskit::absorption_battery(vars));
  report.merge(mdskit::harmonic_battery(vars));

  if (K >= 2) {
    const mdskit::SummationParams params{K, scheme.params.q};
    const mdskit::KeyMaterial keys = mdskit::setup(params, seed, max_attempts);
    const mdskit::Rational key_target = mdskit::harmonic_number(K - 1);
    std::cout << "summation keys: achieved rate "
              << rate_string(keys.key_rate()) << ", optimal "
              << rate_string(key_target) << "\n";
    report.add_equal("key-rate-matches-optimal[K=" + std::to_string(K) + "]",
                     keys.key_rate(), key_target);

    std::vector<std::vector<int>> family;
    for (const auto& users : mdskit::sweep_subsets(K, {})) {
      if (users.size() >= 2) family.push_back(users);
    }
    report.merge(mdskit::check_converse_bounds(keys, family));
  }

  print_report_summary("bounds", report);
  if (!out.empty()) {
    write_file_atomic(out, report.to_json().dump(2) + "\n");
    std::cout << "report written to " << out << "\n";
  }
  return report.overall() ? kExitPass : kExitCheckFailure;
}

int cmd_selftest(std::uint64_t seed) {
  bool all_pass = true;
  const auto gate = [&](const std::string& name, bool ok) {
    std::cout << (ok ? "pass" : "FAIL") << ": " << name << "\n";
    all_pass = all_pass && ok;
  };

  // Enumeration oracle against the rank calculus.
  mdskit::Xoshiro256 rng(seed);
  int oracle_checked = 0;
  bool oracle_ok = true;
  for (std::uint64_t q : {2ull, 3ull, 5ull}) {
    const mdskit::PrimeField field(q);
    const std::size_t max_dim = q == 2 ? 10 : (q == 3 ? 7 : 5);
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t dim = 2 + rng.below(max_dim - 1);
      auto space = std::make_shared<mdskit::SeedSpace>(
          field, std::vector<std::pair<std::string, std::size_t>>{{"S", dim}});
      std::vector<mdskit::LinearRV> vars;
      const std::size_t count = 1 + rng.below(3);
      for (std::size_t i = 0; i < count; ++i) {
        vars.push_back(mdskit::make_rv(
            "R" + std::to_string(i),
            mdskit::random_matrix(rng, 1 + rng.below(3), dim, field), space));
      }
      const double via_rank = mdskit::entropy(vars).symbols.to_double() *
                              std::log2(static_cast<double>(q));
      const double exact = mdskit::brute_force_entropy(vars);
      if (std::abs(exact - via_rank) >= 1e-9) oracle_ok = false;
      ++oracle_checked;
    }
  }
  gate("enumeration oracle matches rank entropy on " +
           std::to_string(oracle_checked) + " instances",
       oracle_ok);

  // Chain identity battery.
  bool chain_ok = true;
  {
    const mdskit::PrimeField field(73);
    auto space = std::make_shared<mdskit::SeedSpace>(
        field, std::vector<std::pair<std::string, std::size_t>>{{"S", 12}});
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<mdskit::LinearRV> vars;
      const std::size_t count = 2 + rng.below(6);
      for (std::size_t i = 0; i < count; ++i) {
        vars.push_back(mdskit::make_rv(
            "R" + std::to_string(i),
            mdskit::random_matrix(rng, 1 + rng.below(4), 12, field), space));
      }
      if (!mdskit::check_chain_identity(vars).pass) chain_ok = false;
    }
  }
  gate("chain identity on 10 random variable lists", chain_ok);

  // Fixtures from the uncoded reference table, GF(5) and GF(11).
  bool fixture_ok = true;
  for (std::uint64_t q : {5ull, 11ull}) {
    const mdskit::PrimeField field(q);
    auto space = std::make_shared<mdskit::SeedSpace>(
        field,
        std::vector<std::pair<std::string, std::size_t>>{{"A", 1}, {"B", 1}});
    std::vector<mdskit::LinearRV> rvs;
    const std::vector<std::vector<std::int64_t>> rows = {
        {1, 0}, {0, 1}, {1, 1}, {1, 2}, {1, 3}};
    for (std::size_t i = 0; i < rows.size(); ++i) {
      rvs.push_back(mdskit::make_rv(
          "Z" + std::to_string(i + 1),
          mdskit::FieldMatrix::from_rows({rows[i]}, field), space));
    }
    for (std::size_t i = 0; i < rvs.size() && fixture_ok; ++i) {
      for (std::size_t j = i + 1; j < rvs.size(); ++j) {
        if (mdskit::entropy({rvs[i], rvs[j]}).symbols != mdskit::Rational(2)) {
          fixture_ok = false;
        }
      }
    }
    const double joint = mdskit::brute_force_entropy(rvs);
    if (std::abs(joint - 2.0 * std::log2(static_cast<double>(q))) >= 1e-9) {
      fixture_ok = false;
    }
  }
  gate("reference-table entropy fixtures over GF(5) and GF(11)", fixture_ok);

  return all_pass ? kExitPass : kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Finite-field toolkit: correlated MDS variable generation at the "
      "harmonic-number rate, secure summation with user selection, and exact "
      "rank-based entropy verification"};
  app.require_subcommand(1);

  int k = 3;
  std::uint64_t q = 10007;
  std::uint64_t seed = 0;
  std::vector<int> levels;
  std::int64_t block = 0;
  int max_attempts = 64;
  int subset_cap = 0;
  std::string in_path, out_path, keys_out;
  bool table2 = false;
  bool fresh_keys = false;
  bool use_vandermonde = false;

  auto* gen = app.add_subcommand(
      "gen", "Sample and certify a variable-generation scheme");
  gen->add_option("--k", k, "Number of users")->required();
  gen->add_option("--q", q, "Prime field modulus");
  gen->add_option("--seed", seed, "RNG seed");
  gen->add_option("--levels", levels, "Levels to generate (default 1..K)");
  gen->add_option("--block", block,
                  "Symbols per generated variable (default n_max!)");
  gen->add_option("--max-attempts", max_attempts,
                  "Rejection-sampling attempts");
  gen->add_option("--out", out_path, "Write the scheme as JSON");

  auto* verify = app.add_subcommand(
      "verify", "Re-certify a scheme and run the full check battery");
  verify->add_option("--in", in_path, "Scheme JSON file");
  verify->add_flag("--vandermonde", use_vandermonde,
                   "Check the uncoded per-level baseline instead");
  verify->add_option("--k", k, "Users (baseline mode)");
  verify->add_option("--q", q, "Prime field modulus (baseline mode)");
  verify->add_option("--subset-cap", subset_cap,
                     "Subsets per size when sampling sweeps");
  verify->add_option("--seed", seed, "Sweep sampling seed");
  verify->add_option("--out", out_path, "Write the report as JSON");

  auto* sum = app.add_subcommand(
      "sum-demo", "Run secure summation over every selectable subset");
  sum->add_option("--k", k, "Number of users")->required();
  sum->add_option("--q", q, "Prime field modulus");
  sum->add_option("--seed", seed, "RNG seed");
  sum->add_flag("--table2", table2,
                "Use the hardcoded 3-user uncoded-keys scheme");
  sum->add_flag("--fresh-keys", fresh_keys,
                "Redraw concrete key seeds for every selection (experiment)");
  sum->add_option("--subset-cap", subset_cap,
                  "Subsets per size when sampling selections");
  sum->add_option("--max-attempts", max_attempts,
                  "Rejection-sampling attempts");
  sum->add_option("--out", out_path, "Write the transcript as JSON");
  sum->add_option("--keys-out", keys_out, "Write the key material as JSON");

  auto* bounds = app.add_subcommand(
      "bounds", "Compare achieved rates against the harmonic targets");
  bounds->add_option("--k", k, "Number of users");
  bounds->add_option("--q", q, "Prime field modulus");
  bounds->add_option("--seed", seed, "RNG seed");
  bounds->add_option("--in", in_path, "Load a scheme instead of sampling");
  bounds->add_option("--max-attempts", max_attempts,
                     "Rejection-sampling attempts");
  bounds->add_option("--out", out_path, "Write the report as JSON");

  auto* selftest = app.add_subcommand(
      "selftest",
      "Cross-check the exact entropy calculus against enumeration");
  selftest->add_option("--seed", seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen->parsed()) {
      return cmd_gen(k, q, seed, levels, block, max_attempts, out_path);
    }
    if (verify->parsed()) {
      return cmd_verify(in_path, use_vandermonde, k, q, subset_cap, seed,
                        out_path);
    }
    if (sum->parsed()) {
      return cmd_sum_demo(k, q, seed, table2, fresh_keys, subset_cap,
                          max_attempts, out_path, keys_out);
    }
    if (bounds->parsed()) {
      return cmd_bounds(k, q, seed, in_path, max_attempts, out_path);
    }
    if (selftest->parsed()) {
      return cmd_selftest(seed);
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid arguments: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailure;
  }
  return kExitUsage;
}
