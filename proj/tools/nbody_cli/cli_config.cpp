#include "nbody_cli/cli_config.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace nbody::cli {

namespace {

// Flag names without the leading dashes; config-file keys use the same names.
const std::vector<std::string> kValueKeys = {
    "n",     "threads", "variant", "precision", "block", "math",
    "steps", "dt",      "softening-sq", "g",    "seed",  "reps",
    "warmup", "out"};

struct Defaults {
  std::string n;
  std::string variant;
  std::string math;
  std::string precision;
  std::string block;
  std::string threads;
  std::string steps;
};

Defaults defaults_for(Command command) {
  switch (command) {
    case Command::Bench:
      return {"256,512,1024,2048,4096,8192,16384,32768", "all", "pow", "double",
              "64", "1", "100"};
    case Command::Validate:
      return {"1024", "all", "both", "both", "8,64,256", "1,2,4", "10"};
    case Command::Run:
    case Command::Report:
      break;
  }
  return {"1024", "soa", "pow", "double", "64", "1", "100"};
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

[[noreturn]] void usage(const std::string& flag, const std::string& message) {
  throw UsageError("--" + flag + ": " + message);
}

std::vector<std::string> split_list(const std::string& flag,
                                    const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    std::string item = trim(std::string_view(text).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start));
    if (item.empty()) usage(flag, "malformed list '" + text + "'");
    out.push_back(std::move(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename Int>
Int parse_integer(const std::string& flag, const std::string& text, Int min_value) {
  Int value{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    usage(flag, "expected an integer, got '" + text + "'");
  }
  if (value < min_value) {
    usage(flag, "must be >= " + std::to_string(min_value) + ", got '" + text + "'");
  }
  return value;
}

double parse_real(const std::string& flag, const std::string& text) {
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() ||
      !std::isfinite(value)) {
    usage(flag, "expected a real number, got '" + text + "'");
  }
  return value;
}

template <typename Int>
std::vector<Int> parse_int_list(const std::string& flag, const std::string& text,
                                Int min_value) {
  std::vector<Int> out;
  for (const auto& item : split_list(flag, text)) {
    out.push_back(parse_integer<Int>(flag, item, min_value));
  }
  return out;
}

bool parse_bool(const std::string& flag, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  usage(flag, "expected true or false, got '" + text + "'");
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("--config: cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_text(ss.str());
  } catch (const UsageError& e) {
    throw UsageError("--config " + path.string() + ": " + e.what());
  }
}

struct FamilySelection {
  bool aos = false;
  bool soa = false;
  bool blocked = false;
  bool explicit_aos = false;
};

FamilySelection parse_families(const std::string& text) {
  FamilySelection f;
  if (trim(text) == "all") {
    f.aos = f.soa = f.blocked = true;
    return f;
  }
  for (const auto& item : split_list("variant", text)) {
    if (item == "aos") {
      f.aos = f.explicit_aos = true;
    } else if (item == "soa") {
      f.soa = true;
    } else if (item == "blocked" || item == "soa_blocked") {
      f.blocked = true;
    } else if (item == "all") {
      usage("variant", "'all' cannot be combined with other variants");
    } else {
      usage("variant", "unknown variant '" + item + "' (expected aos, soa, blocked or all)");
    }
  }
  return f;
}

CliConfig resolve(Command command, const std::map<std::string, std::string>& file,
                  const std::map<std::string, std::string>& flags,
                  std::optional<std::filesystem::path> config_path,
                  std::optional<std::filesystem::path> report_input) {
  CliConfig cfg;
  cfg.command = command;
  cfg.config_path = std::move(config_path);
  cfg.report_input = std::move(report_input);

  const Defaults d = defaults_for(command);
  const SimParams default_params;
  std::map<std::string, std::string> v = {
      {"n", d.n},
      {"threads", d.threads},
      {"variant", d.variant},
      {"precision", d.precision},
      {"math", d.math},
      {"steps", d.steps},
      {"dt", format_checksum(default_params.dt)},
      {"softening-sq", format_checksum(default_params.softening_sq)},
      {"g", format_checksum(default_params.gravitational_constant)},
      {"seed", "42"},
      {"reps", "5"},
      {"warmup", "1"},
      {"resume", "false"},
  };
  const bool block_given = file.count("block") || flags.count("block");
  for (const auto* src : {&file, &flags}) {
    for (const auto& [key, value] : *src) v[key] = value;
  }

  auto& plan = cfg.plan;
  plan.n_values = parse_int_list<std::size_t>("n", v["n"], 1);
  plan.thread_counts = parse_int_list<unsigned>("threads", v["threads"], 1);
  plan.params.steps = parse_integer<std::uint64_t>("steps", v["steps"], 1);
  plan.params.dt = parse_real("dt", v["dt"]);
  if (!(plan.params.dt > 0.0)) usage("dt", "must be positive");
  plan.params.softening_sq = parse_real("softening-sq", v["softening-sq"]);
  if (!(plan.params.softening_sq >= 0.0)) usage("softening-sq", "must be >= 0");
  plan.params.gravitational_constant = parse_real("g", v["g"]);
  if (!(plan.params.gravitational_constant > 0.0)) usage("g", "must be positive");
  plan.seed.value = parse_integer<std::uint64_t>("seed", v["seed"], 0);
  plan.repetitions = parse_integer<unsigned>("reps", v["reps"], 1);
  plan.warmup_runs = parse_integer<unsigned>("warmup", v["warmup"], 0);
  cfg.resume = parse_bool("resume", v["resume"]);
  if (v.count("out") && !v["out"].empty()) cfg.out = v["out"];

  const std::string precision = trim(v["precision"]);
  if (precision == "both") {
    plan.precisions = {Precision::Double, Precision::Single};
  } else if (precision == "single" || precision == "double") {
    plan.precisions = {parse_precision(precision)};
  } else {
    usage("precision", "expected single, double or both, got '" + precision + "'");
  }

  std::vector<MathForm> forms;
  const std::string math = trim(v["math"]);
  if (math == "both") {
    forms = {MathForm::PowThenDivide, MathForm::ReciprocalMultiply};
  } else if (math == "pow" || math == "recip") {
    forms = {parse_math_form(math)};
  } else {
    usage("math", "expected pow, recip or both, got '" + math + "'");
  }

  const FamilySelection families = parse_families(v["variant"]);
  if (block_given || families.blocked) {
    cfg.block_sizes = parse_int_list<std::size_t>("block", v.count("block") ? v["block"] : d.block, 1);
  }
  if (block_given && !families.blocked) {
    usage("block", "block sizes require the 'blocked' variant");
  }
  if (families.explicit_aos) {
    if (std::any_of(plan.thread_counts.begin(), plan.thread_counts.end(),
                    [](unsigned t) { return t != 1; })) {
      usage("threads", "variant aos is sequential-only (threads must be 1)");
    }
    if (std::find(forms.begin(), forms.end(), MathForm::ReciprocalMultiply) !=
        forms.end()) {
      usage("math", "variant aos supports only the pow form");
    }
  }
  if (cfg.resume && !cfg.out) usage("resume", "requires --out");

  plan.variants.clear();
  if (families.aos) {
    for (const MathForm form : forms) {
      plan.variants.push_back({Layout::Aos, form, std::nullopt, 1});
    }
  }
  if (families.soa) {
    for (const MathForm form : forms) {
      plan.variants.push_back({Layout::Soa, form, std::nullopt, 1});
    }
  }
  if (families.blocked) {
    for (const std::size_t b : cfg.block_sizes) {
      for (const MathForm form : forms) {
        plan.variants.push_back({Layout::Soa, form, b, 1});
      }
    }
  }

  if (!cfg.block_sizes.empty()) {
    std::string blocks;
    for (const auto b : cfg.block_sizes) {
      blocks += (blocks.empty() ? "" : ",") + std::to_string(b);
    }
    v["block"] = blocks;
  }
  v.erase("config");
  cfg.resolved = std::move(v);
  return cfg;
}

}  // namespace

std::string_view to_string(Command command) {
  switch (command) {
    case Command::Run: return "run";
    case Command::Bench: return "bench";
    case Command::Validate: return "validate";
    case Command::Report: return "report";
  }
  return "?";
}

std::map<std::string, std::string> parse_config_text(std::string_view text) {
  const std::set<std::string> known(kValueKeys.begin(), kValueKeys.end());
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw UsageError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = normalize_key(trim(std::string_view(content).substr(0, eq)));
    const std::string value = trim(std::string_view(content).substr(eq + 1));
    if (key != "resume" && known.count(key) == 0) {
      throw UsageError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    out[key] = value;
  }
  return out;
}

CliConfig parse_args(int argc, const char* const* argv) {
  CLI::App app{"All-pairs N-body kernels, benchmark sweeps and validation", "nbody"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand help for every subcommand");

  std::map<std::string, std::string> raw;
  std::string config_path;
  std::string report_input;
  bool resume = false;

  struct Sub {
    Command command;
    CLI::App* app;
  };
  std::vector<Sub> subs = {
      {Command::Run, app.add_subcommand("run", "Simulate each configuration once and print checksums")},
      {Command::Bench, app.add_subcommand("bench", "Measure a sweep and write CSV rows")},
      {Command::Validate, app.add_subcommand("validate", "Cross-check kernel variants against the oracle")},
      {Command::Report, app.add_subcommand("report", "Render markdown tables from a results CSV")},
  };
  const std::map<std::string, std::string> help = {
      {"n", "Body counts, comma-separated"},
      {"threads", "Thread counts, comma-separated"},
      {"variant", "aos, soa, blocked (comma-separated) or all"},
      {"precision", "single, double or both"},
      {"block", "Block sizes for the blocked variant, comma-separated"},
      {"math", "pow, recip or both"},
      {"steps", "Simulation steps per run"},
      {"dt", "Time step"},
      {"softening-sq", "Softening added to squared distances"},
      {"g", "Gravitational constant"},
      {"seed", "Initial-condition seed (u64)"},
      {"reps", "Timed repetitions per configuration"},
      {"warmup", "Unmeasured warmup runs per configuration"},
      {"out", "Output path"},
  };
  std::map<std::string, std::string> storage;
  for (auto& sub : subs) {
    for (const auto& key : kValueKeys) {
      sub.app->add_option("--" + key, storage[key], help.at(key));
    }
    sub.app->add_flag("--resume", resume, "Skip combinations already in --out");
    sub.app->add_option("--config", config_path, "Config file of key = value lines");
  }
  subs[3].app->add_option("input", report_input, "Results CSV to render");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested(app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  const Sub* chosen = nullptr;
  for (const auto& sub : subs) {
    if (sub.app->parsed()) chosen = &sub;
  }
  if (chosen == nullptr) throw UsageError("a subcommand is required");

  for (const auto& key : kValueKeys) {
    if (chosen->app->get_option("--" + key)->count() > 0) raw[key] = storage[key];
  }
  if (chosen->app->get_option("--resume")->count() > 0) raw["resume"] = resume ? "true" : "false";

  std::map<std::string, std::string> file;
  std::optional<std::filesystem::path> cfg_path;
  if (!config_path.empty()) {
    cfg_path = config_path;
    file = read_config_file(config_path);
  }
  std::optional<std::filesystem::path> input;
  if (chosen->command == Command::Report) {
    if (report_input.empty()) throw UsageError("report: a results CSV path is required");
    input = report_input;
  }
  return resolve(chosen->command, file, raw, cfg_path, input);
}

CliConfig parse_args(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("nbody");
  for (const auto& a : args) argv.push_back(a.c_str());
  return parse_args(static_cast<int>(argv.size()), argv.data());
}

std::string describe(const CliConfig& config) {
  std::ostringstream os;
  os << "# nbody " << to_string(config.command) << " resolved configuration\n";
  if (config.config_path) os << "# config file: " << config.config_path->string() << "\n";
  for (const auto& [key, value] : config.resolved) {
    os << key << " = " << value << "\n";
  }
  return os.str();
}

std::vector<LadderEntry> ladder_entries(const CliConfig& config, std::size_t n) {
  std::vector<LadderEntry> out;
  for (const Precision p : config.plan.precisions) {
    for (const auto& shape : config.plan.variants) {
      for (const unsigned t : config.plan.thread_counts) {
        KernelVariant v = shape;
        v.threads = t;
        if (v.invalid_reason(n)) continue;
        out.push_back({v, p});
      }
    }
  }
  return out;
}

}  // namespace nbody::cli
