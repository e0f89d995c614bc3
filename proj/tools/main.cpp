#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "comoment/annuity.hpp"
#include "comoment/bounds.hpp"
#include "comoment/couplings.hpp"
#include "comoment/dependence.hpp"
#include "comoment/errors.hpp"
#include "comoment/estimates.hpp"
#include "comoment/format.hpp"
#include "comoment/marginals.hpp"
#include "comoment/mixture.hpp"
#include "comoment/risk.hpp"
#include "comoment/tables.hpp"

namespace {

using nlohmann::ordered_json;

// Level pairs emitted by copula-sample live on their own stream so that the
// CSV never aliases draws consumed by the estimators.
constexpr std::uint64_t kSampleStream = 9001;

// Options shared by every subcommand.
struct Common {
  std::uint64_t seed = 42;
  unsigned threads = 0;
  std::string format = "csv";
  std::string out;
  bool echo = false;
};

void add_common(CLI::App* cmd, Common& c, bool with_format) {
  cmd->add_option("--seed", c.seed, "RNG seed")->capture_default_str();
  cmd->add_option("--threads", c.threads, "worker threads (0 = all cores)")
      ->capture_default_str();
  if (with_format)
    cmd->add_option("--format", c.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
  cmd->add_option("--out", c.out, "output file (default: stdout)");
  cmd->add_flag("--echo-config", c.echo,
                "print the parsed configuration and exit");
}

// Sample sizes accept scientific notation (-n 1e7).
std::uint64_t to_count(double n, const char* what) {
  if (!(n >= 1.0) || n != std::floor(n) || n > 9e15)
    throw comoment::ParseError(std::string(what) +
                               " must be a positive integer");
  return static_cast<std::uint64_t>(n);
}

class Sink {
public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_)
        throw comoment::ParseError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
  std::ofstream file_;
};

using ConfigKv = std::vector<std::pair<std::string, std::string>>;

void echo_config(const ConfigKv& kv) {
  for (const auto& [k, v] : kv) std::cout << k << '=' << v << '\n';
}

void append_common(ConfigKv& kv, const Common& c, bool with_format) {
  kv.emplace_back("seed", std::to_string(c.seed));
  kv.emplace_back("threads", std::to_string(c.threads));
  if (with_format) kv.emplace_back("format", c.format);
  kv.emplace_back("out", c.out);
}

ordered_json estimate_json(const comoment::Estimate& e) {
  return ordered_json{
      {"value", e.value}, {"stderr", e.se}, {"n", e.n}, {"seed", e.seed}};
}

void emit_estimate(const comoment::Estimate& e, const Common& c) {
  Sink sink(c.out);
  if (c.format == "json") {
    sink.stream() << estimate_json(e).dump(2) << '\n';
  } else {
    sink.stream() << "value,stderr,n,seed\n"
                  << comoment::format_double(e.value) << ','
                  << comoment::format_double(e.se) << ',' << e.n << ','
                  << e.seed << '\n';
  }
}

comoment::Parity parse_parity(const std::string& text) {
  if (text == "even") return comoment::Parity::EvenD;
  if (text == "odd") return comoment::Parity::OddD;
  throw comoment::ParseError("parity must be 'even' or 'odd', got '" + text +
                             "'");
}

comoment::Extreme parse_direction(const std::string& text) {
  if (text == "max") return comoment::Extreme::Max;
  if (text == "min") return comoment::Extreme::Min;
  throw comoment::ParseError("direction must be 'max' or 'min', got '" + text +
                             "'");
}

comoment::Method parse_method(const std::string& text) {
  if (text == "closed") return comoment::Method::ClosedForm;
  if (text == "quad") return comoment::Method::Quadrature;
  if (text == "mc") return comoment::Method::MonteCarlo;
  throw comoment::ParseError("method must be closed, quad or mc, got '" + text +
                             "'");
}

// "x=18.76,y=23.06" -> expected remaining lifetimes.
std::pair<double, double> parse_life_table(const std::string& text) {
  auto fail = [&text]() -> double {
    throw comoment::ParseError("life table must look like x=18.76,y=23.06, got '" +
                               text + "'");
  };
  auto comma = text.find(',');
  if (comma == std::string::npos) fail();
  std::string xs = text.substr(0, comma), ys = text.substr(comma + 1);
  auto field = [&fail](const std::string& part, const char* key) {
    if (part.size() < 3 || part[0] != key[0] || part[1] != '=') return fail();
    std::size_t used = 0;
    double v = std::stod(part.substr(2), &used);
    if (used != part.size() - 2) return fail();
    return v;
  };
  return {field(xs, "x"), field(ys, "y")};
}

void run_bounds(const Common& c, const std::string& m1_text,
                const std::string& m2_text, int d, bool centered,
                const std::string& method_text, double n_raw) {
  comoment::Marginal m1 = comoment::Marginal::parse(m1_text);
  comoment::Marginal m2 = comoment::Marginal::parse(m2_text);
  comoment::Method method = parse_method(method_text);
  std::uint64_t n =
      method == comoment::Method::MonteCarlo ? to_count(n_raw, "-n") : 0;
  comoment::BoundsResult b =
      centered ? comoment::centered_bounds(m1, m2, d, method, n, c.seed, c.threads)
               : comoment::raw_bounds(m1, m2, d, method, n, c.seed, c.threads);
  Sink sink(c.out);
  if (c.format == "json") {
    ordered_json j;
    j["lower"] = ordered_json{{"value", b.lower},
                              {"stderr", b.lower_stderr},
                              {"n", n},
                              {"seed", c.seed}};
    j["upper"] = ordered_json{{"value", b.upper},
                              {"stderr", b.upper_stderr},
                              {"n", n},
                              {"seed", c.seed}};
    sink.stream() << j.dump(2) << '\n';
  } else {
    sink.stream() << "bound,value,stderr,n,seed\n"
                  << "lower," << comoment::format_double(b.lower) << ','
                  << comoment::format_double(b.lower_stderr) << ',' << n << ','
                  << c.seed << '\n'
                  << "upper," << comoment::format_double(b.upper) << ','
                  << comoment::format_double(b.upper_stderr) << ',' << n << ','
                  << c.seed << '\n';
  }
}

void run_tail(bool es_mode, const Common& c, double rate1, double rate2,
              double lambda, const std::string& parity_text, double p,
              double n_raw, const std::string& sweep) {
  std::uint64_t n = to_count(n_raw, "-n");
  comoment::MixtureParams params{rate1, rate2, lambda,
                                 parse_parity(parity_text)};
  auto estimate = [&](double mix) {
    comoment::MixtureParams pm = params;
    pm.mix = mix;
    return es_mode ? comoment::es_mixture(pm, p, n, c.seed, c.threads)
                   : comoment::mes_mixture(pm, p, n, c.seed, c.threads);
  };
  if (sweep.empty()) {
    emit_estimate(estimate(lambda), c);
    return;
  }
  std::vector<double> mixes;
  std::string rest = sweep;
  while (!rest.empty()) {
    auto comma = rest.find(',');
    std::string tok = rest.substr(0, comma);
    rest = comma == std::string::npos ? std::string() : rest.substr(comma + 1);
    std::size_t used = 0;
    double v = tok.empty() ? -1.0 : std::stod(tok, &used);
    if (tok.empty() || used != tok.size())
      throw comoment::ParseError("bad --sweep-lambda entry '" + tok + "'");
    mixes.push_back(v);
  }
  Sink sink(c.out);
  if (c.format == "json") {
    ordered_json arr = ordered_json::array();
    for (double mix : mixes) {
      comoment::Estimate e = estimate(mix);
      ordered_json j = estimate_json(e);
      j["lambda"] = mix;
      arr.push_back(std::move(j));
    }
    sink.stream() << arr.dump(2) << '\n';
  } else {
    sink.stream() << "lambda,value,stderr,n,seed\n";
    for (double mix : mixes) {
      comoment::Estimate e = estimate(mix);
      sink.stream() << comoment::format_double(mix) << ','
                    << comoment::format_double(e.value) << ','
                    << comoment::format_double(e.se) << ',' << e.n << ','
                    << e.seed << '\n';
    }
  }
}

int run_cli(int argc, char** argv) {
  CLI::App app{
      "Sharp mixed-moment bounds under dependence uncertainty, extremal "
      "copula sampling and the exponential mixture model"};
  app.require_subcommand(1);
  app.fallthrough(false);

  // --- bounds ---
  auto* bounds_cmd = app.add_subcommand(
      "bounds", "sharp bounds of E[X1 X2^d] over all couplings");
  static Common bounds_common;
  static std::string bounds_m1, bounds_m2, bounds_method = "quad";
  static int bounds_d = 1;
  static bool bounds_centered = false;
  static double bounds_n = 1e6;
  bounds_cmd->add_option("--marginal1", bounds_m1, "first marginal spec")
      ->required();
  bounds_cmd->add_option("--marginal2", bounds_m2, "second marginal spec")
      ->required();
  bounds_cmd->add_option("-d", bounds_d, "moment order")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bounds_cmd->add_flag("--centered", bounds_centered,
                       "bound the standardized moment");
  bounds_cmd->add_option("--method", bounds_method, "closed | quad | mc")
      ->capture_default_str();
  bounds_cmd->add_option("-n", bounds_n, "Monte Carlo sample size")
      ->capture_default_str();
  add_common(bounds_cmd, bounds_common, true);
  bounds_cmd->callback([] {
    if (bounds_common.echo) {
      ConfigKv kv{{"subcommand", "bounds"},
                  {"marginal1", comoment::Marginal::parse(bounds_m1).describe()},
                  {"marginal2", comoment::Marginal::parse(bounds_m2).describe()},
                  {"d", std::to_string(bounds_d)},
                  {"centered", bounds_centered ? "1" : "0"},
                  {"method", bounds_method},
                  {"n", comoment::format_double(bounds_n)}};
      append_common(kv, bounds_common, true);
      echo_config(kv);
      return;
    }
    run_bounds(bounds_common, bounds_m1, bounds_m2, bounds_d, bounds_centered,
               bounds_method, bounds_n);
  });

  // --- rank-coeff ---
  auto* rank_cmd = app.add_subcommand(
      "rank-coeff", "standardized rank coefficient of order d");
  static Common rank_common;
  static std::string rank_input, rank_parity, rank_direction, rank_m1, rank_m2;
  static int rank_d = 1;
  static double rank_lambda = 0.5, rank_rate1 = 1.0, rank_rate2 = 1.0;
  static double rank_n = 1e6;
  static bool rank_model = false;
  auto* rank_input_opt =
      rank_cmd->add_option("--input", rank_input, "two-column CSV of pairs");
  auto* rank_model_opt = rank_cmd->add_flag(
      "--model", rank_model, "population value of a model coupling");
  rank_cmd->add_option("-d", rank_d, "moment order")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  auto* rank_lambda_opt = rank_cmd->add_option(
      "--lambda", rank_lambda, "mixture level (model mode)");
  rank_cmd->add_option("--rate1", rank_rate1, "first exponential rate")
      ->capture_default_str();
  rank_cmd->add_option("--rate2", rank_rate2, "second exponential rate")
      ->capture_default_str();
  rank_cmd->add_option("--parity", rank_parity,
                       "even | odd (default: parity of d)");
  auto* rank_dir_opt = rank_cmd->add_option(
      "--direction", rank_direction, "max | min extremal coupling (model mode)");
  rank_cmd->add_option("--marginal1", rank_m1,
                       "first marginal of the extremal coupling");
  rank_cmd->add_option("--marginal2", rank_m2,
                       "second marginal of the extremal coupling");
  rank_cmd->add_option("-n", rank_n, "Monte Carlo sample size")
      ->capture_default_str();
  rank_input_opt->excludes(rank_model_opt);
  rank_lambda_opt->excludes(rank_dir_opt);
  add_common(rank_cmd, rank_common, true);
  rank_cmd->callback([] {
    if (rank_common.echo) {
      ConfigKv kv{{"subcommand", "rank-coeff"}, {"d", std::to_string(rank_d)}};
      if (!rank_input.empty()) kv.emplace_back("input", rank_input);
      if (rank_model) {
        kv.emplace_back("model", "1");
        if (!rank_direction.empty()) {
          kv.emplace_back("direction", rank_direction);
          kv.emplace_back(
              "marginal1",
              comoment::Marginal::parse(rank_m1.empty() ? "unif:a=0,b=1" : rank_m1)
                  .describe());
          kv.emplace_back("marginal2",
                          comoment::Marginal::parse(rank_m2).describe());
        } else {
          kv.emplace_back("lambda", comoment::format_double(rank_lambda));
          kv.emplace_back("rate1", comoment::format_double(rank_rate1));
          kv.emplace_back("rate2", comoment::format_double(rank_rate2));
          kv.emplace_back("parity", rank_parity.empty()
                                        ? (rank_d % 2 == 0 ? "even" : "odd")
                                        : rank_parity);
        }
        kv.emplace_back("n", comoment::format_double(rank_n));
      }
      append_common(kv, rank_common, true);
      echo_config(kv);
      return;
    }
    if (!rank_input.empty()) {
      comoment::PairedSample sample = comoment::load_pairs_csv(rank_input);
      comoment::Estimate e;
      e.value = comoment::rank_coefficient(sample, rank_d);
      e.se = 0.0;
      e.n = sample.size();
      e.seed = rank_common.seed;
      emit_estimate(e, rank_common);
      return;
    }
    if (!rank_model)
      throw comoment::ParseError("rank-coeff needs --input FILE or --model");
    std::uint64_t n = to_count(rank_n, "-n");
    if (!rank_direction.empty()) {
      if (rank_m2.empty())
        throw comoment::ParseError("--direction mode needs --marginal2");
      comoment::CouplingSpec spec{
          comoment::Marginal::parse(rank_m1.empty() ? "unif:a=0,b=1" : rank_m1),
          comoment::Marginal::parse(rank_m2), rank_d,
          parse_direction(rank_direction)};
      emit_estimate(comoment::rank_coefficient_model(spec, n, rank_common.seed,
                                                     rank_common.threads),
                    rank_common);
      return;
    }
    std::string parity = rank_parity.empty()
                             ? (rank_d % 2 == 0 ? "even" : "odd")
                             : rank_parity;
    comoment::MixtureParams params{rank_rate1, rank_rate2, rank_lambda,
                                   parse_parity(parity)};
    emit_estimate(comoment::rank_coefficient_model(params, rank_d, n,
                                                   rank_common.seed,
                                                   rank_common.threads),
                  rank_common);
  });

  // --- copula-sample ---
  auto* cs_cmd = app.add_subcommand(
      "copula-sample", "draw (u1,u2,x1,x2) from an extremal coupling");
  static Common cs_common;
  static std::string cs_m1, cs_m2, cs_direction = "max";
  static int cs_d = 1;
  static double cs_n = 1000;
  cs_cmd->add_option("--marginal1", cs_m1, "first marginal spec")->required();
  cs_cmd->add_option("--marginal2", cs_m2, "second marginal spec")->required();
  cs_cmd->add_option("-d", cs_d, "moment order")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cs_cmd->add_option("--direction", cs_direction, "max | min")
      ->capture_default_str();
  cs_cmd->add_option("-n", cs_n, "number of draws")->capture_default_str();
  add_common(cs_cmd, cs_common, false);
  cs_cmd->callback([] {
    if (cs_common.echo) {
      ConfigKv kv{{"subcommand", "copula-sample"},
                  {"marginal1", comoment::Marginal::parse(cs_m1).describe()},
                  {"marginal2", comoment::Marginal::parse(cs_m2).describe()},
                  {"d", std::to_string(cs_d)},
                  {"direction", cs_direction},
                  {"n", comoment::format_double(cs_n)}};
      append_common(kv, cs_common, false);
      echo_config(kv);
      return;
    }
    std::uint64_t n = to_count(cs_n, "-n");
    comoment::CouplingSpec spec{comoment::Marginal::parse(cs_m1),
                                comoment::Marginal::parse(cs_m2), cs_d,
                                parse_direction(cs_direction)};
    std::vector<double> u1(n), u2(n), x1(n), x2(n);
    comoment::sample_xy_batch(spec, n, cs_common.seed, kSampleStream, u1.data(),
                              u2.data(), x1.data(), x2.data(),
                              cs_common.threads);
    Sink sink(cs_common.out);
    sink.stream() << "u1,u2,x1,x2\n";
    for (std::uint64_t i = 0; i < n; ++i)
      sink.stream() << comoment::format_double(u1[i]) << ','
                    << comoment::format_double(u2[i]) << ','
                    << comoment::format_double(x1[i]) << ','
                    << comoment::format_double(x2[i]) << '\n';
  });

  // --- mixture-sample ---
  auto* ms_cmd = app.add_subcommand(
      "mixture-sample", "draw (u1,u2,l1,l2) from the exponential mixture");
  static Common ms_common;
  static std::string ms_parity = "even";
  static double ms_rate1 = 1.0, ms_rate2 = 1.0, ms_lambda = 0.5, ms_n = 1000;
  ms_cmd->add_option("--rate1", ms_rate1, "first exponential rate")
      ->capture_default_str();
  ms_cmd->add_option("--rate2", ms_rate2, "second exponential rate")
      ->capture_default_str();
  ms_cmd->add_option("--lambda", ms_lambda, "mixture level in [0,1]")
      ->capture_default_str();
  ms_cmd->add_option("--parity", ms_parity, "even | odd")
      ->capture_default_str();
  ms_cmd->add_option("-n", ms_n, "number of draws")->capture_default_str();
  add_common(ms_cmd, ms_common, false);
  ms_cmd->callback([] {
    if (ms_common.echo) {
      ConfigKv kv{{"subcommand", "mixture-sample"},
                  {"rate1", comoment::format_double(ms_rate1)},
                  {"rate2", comoment::format_double(ms_rate2)},
                  {"lambda", comoment::format_double(ms_lambda)},
                  {"parity", ms_parity},
                  {"n", comoment::format_double(ms_n)}};
      append_common(kv, ms_common, false);
      echo_config(kv);
      return;
    }
    std::uint64_t n = to_count(ms_n, "-n");
    comoment::MixtureParams params{ms_rate1, ms_rate2, ms_lambda,
                                   parse_parity(ms_parity)};
    std::vector<comoment::MixtureDraw> draws =
        comoment::sample_mixture(params, n, ms_common.seed, ms_common.threads);
    Sink sink(ms_common.out);
    sink.stream() << "u1,u2,l1,l2\n";
    for (const comoment::MixtureDraw& dr : draws)
      sink.stream() << comoment::format_double(dr.u1) << ','
                    << comoment::format_double(dr.u2) << ','
                    << comoment::format_double(dr.l1) << ','
                    << comoment::format_double(dr.l2) << '\n';
  });

  // --- es / mes ---
  static Common tail_common[2];
  static double tail_rate1[2] = {1.0, 1.0}, tail_rate2[2] = {1.0, 1.0};
  static double tail_lambda[2] = {0.5, 0.5}, tail_p[2] = {0.95, 0.95};
  static double tail_n[2] = {1e6, 1e6};
  static std::string tail_parity[2] = {"even", "even"};
  static std::string tail_sweep[2];
  const char* tail_names[2] = {"es", "mes"};
  const char* tail_help[2] = {
      "expected shortfall of the aggregate mixture loss",
      "marginal expected shortfall of the first loss"};
  for (int which = 0; which < 2; ++which) {
    auto* cmd = app.add_subcommand(tail_names[which], tail_help[which]);
    auto w = static_cast<std::size_t>(which);
    cmd->add_option("--rate1", tail_rate1[w], "first exponential rate")
        ->capture_default_str();
    cmd->add_option("--rate2", tail_rate2[w], "second exponential rate")
        ->capture_default_str();
    cmd->add_option("--lambda", tail_lambda[w], "mixture level in [0,1]")
        ->capture_default_str();
    cmd->add_option("--p", tail_p[w], "tail level in (0,1)")
        ->capture_default_str();
    cmd->add_option("--parity", tail_parity[w], "even | odd")
        ->capture_default_str();
    cmd->add_option("-n", tail_n[w], "Monte Carlo sample size")
        ->capture_default_str();
    cmd->add_option("--sweep-lambda", tail_sweep[w],
                    "comma list of mixture levels; one CSV row each");
    add_common(cmd, tail_common[w], true);
    cmd->callback([which] {
      auto w = static_cast<std::size_t>(which);
      if (tail_common[w].echo) {
        ConfigKv kv{{"subcommand", which == 0 ? "es" : "mes"},
                    {"rate1", comoment::format_double(tail_rate1[w])},
                    {"rate2", comoment::format_double(tail_rate2[w])},
                    {"lambda", comoment::format_double(tail_lambda[w])},
                    {"p", comoment::format_double(tail_p[w])},
                    {"parity", tail_parity[w]},
                    {"n", comoment::format_double(tail_n[w])}};
        if (!tail_sweep[w].empty())
          kv.emplace_back("sweep-lambda", tail_sweep[w]);
        append_common(kv, tail_common[w], true);
        echo_config(kv);
        return;
      }
      run_tail(which == 0, tail_common[w], tail_rate1[w], tail_rate2[w],
               tail_lambda[w], tail_parity[w], tail_p[w], tail_n[w],
               tail_sweep[w]);
    });
  }

  // --- annuity ---
  auto* an_cmd = app.add_subcommand(
      "annuity", "present value of a joint-life or last-survivor annuity");
  static Common an_common;
  static std::string an_status = "last", an_life_table;
  static double an_rate_x = 1.0, an_rate_y = 1.0, an_interest = 0.045;
  static double an_lambda = 0.5, an_n = 1e6;
  static int an_term = 30;
  an_cmd->add_option("--status", an_status,
                     "joint | last | joint-indep | last-indep")
      ->check(CLI::IsMember({"joint", "last", "joint-indep", "last-indep"}))
      ->capture_default_str();
  auto* an_rx_opt = an_cmd->add_option("--rate-x", an_rate_x,
                                       "force of mortality of life x")
                        ->capture_default_str();
  auto* an_ry_opt = an_cmd->add_option("--rate-y", an_rate_y,
                                       "force of mortality of life y")
                        ->capture_default_str();
  auto* an_lt_opt = an_cmd->add_option(
      "--life-table", an_life_table,
      "expected remaining lifetimes x=..,y=.. (calibrates the rates)");
  an_lt_opt->excludes(an_rx_opt)->excludes(an_ry_opt);
  an_cmd->add_option("--interest", an_interest, "flat yearly interest")
      ->capture_default_str();
  an_cmd->add_option("--term", an_term, "years of payments")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  an_cmd->add_option("--lambda", an_lambda, "mixture level in [0,1]")
      ->capture_default_str();
  an_cmd->add_option("-n", an_n, "Monte Carlo sample size")
      ->capture_default_str();
  add_common(an_cmd, an_common, true);
  an_cmd->callback([] {
    double rx = an_rate_x, ry = an_rate_y;
    if (!an_life_table.empty()) {
      auto [ex, ey] = parse_life_table(an_life_table);
      std::tie(rx, ry) = comoment::calibrate_rates(ex, ey);
    }
    if (an_common.echo) {
      ConfigKv kv{{"subcommand", "annuity"},
                  {"status", an_status},
                  {"rate-x", comoment::format_double(rx)},
                  {"rate-y", comoment::format_double(ry)},
                  {"interest", comoment::format_double(an_interest)},
                  {"term", std::to_string(an_term)},
                  {"lambda", comoment::format_double(an_lambda)},
                  {"n", comoment::format_double(an_n)}};
      append_common(kv, an_common, true);
      echo_config(kv);
      return;
    }
    comoment::AnnuityStatus status;
    if (an_status == "joint")
      status = comoment::AnnuityStatus::JointLife;
    else if (an_status == "last")
      status = comoment::AnnuityStatus::LastSurvivor;
    else if (an_status == "joint-indep")
      status = comoment::AnnuityStatus::IndependentJointLife;
    else
      status = comoment::AnnuityStatus::IndependentLastSurvivor;
    comoment::AnnuitySpec spec{rx,      ry,        an_interest,
                               an_term, an_lambda, status};
    emit_estimate(comoment::annuity_pv(spec, to_count(an_n, "-n"),
                                       an_common.seed, an_common.threads),
                  an_common);
  });

  // --- reproduce ---
  auto* rep_cmd = app.add_subcommand(
      "reproduce", "regenerate a published table or figure dataset as CSV");
  static Common rep_common;
  static std::string rep_target;
  static double rep_n = 0;
  rep_cmd->add_option("target", rep_target,
                      "table1..table5 or fig1..fig6")
      ->required();
  rep_cmd->add_option("-n", rep_n, "sample size (0 = per-target default)")
      ->capture_default_str();
  add_common(rep_cmd, rep_common, false);
  rep_cmd->callback([] {
    if (rep_common.echo) {
      ConfigKv kv{{"subcommand", "reproduce"},
                  {"target", rep_target},
                  {"n", comoment::format_double(rep_n)}};
      append_common(kv, rep_common, false);
      echo_config(kv);
      return;
    }
    std::uint64_t n = rep_n == 0 ? 0 : to_count(rep_n, "-n");
    Sink sink(rep_common.out);
    comoment::write_reproduction(rep_target, sink.stream(), n, rep_common.seed,
                                 rep_common.threads);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const comoment::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
