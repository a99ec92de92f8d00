#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "mdelta/artifact.hpp"
#include "mdelta/bounds.hpp"
#include "mdelta/codec.hpp"
#include "mdelta/coders.hpp"
#include "mdelta/error.hpp"
#include "mdelta/experiment.hpp"
#include "mdelta/lemma_lab.hpp"
#include "mdelta/redundancy.hpp"
#include "mdelta/source_io.hpp"
#include "mdelta/source_model.hpp"
#include "mdelta/version.hpp"

namespace mdelta::cli {

namespace {

class VerificationFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string read_file(const std::string& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw PreconditionError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Destination of an artifact: a file, or `fallback` for "-".
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback, bool binary = false) : path_(path) {
    if (path == "-") {
      stream_ = &fallback;
      return;
    }
    file_ = std::make_unique<std::ofstream>(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    if (!*file_) throw PreconditionError("cannot write '" + path + "'");
    stream_ = file_.get();
  }
  std::ostream& stream() { return *stream_; }
  bool is_stdout() const { return path_ == "-"; }
  void close() {
    if (file_) {
      file_->close();
      if (!*file_) throw std::runtime_error("failed writing '" + path_ + "'");
    }
  }

 private:
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

// "16384" or "2^14".
double parse_length(const std::string& text) {
  const std::string t = trim(text);
  try {
    std::size_t pos = 0;
    if (const auto caret = t.find('^'); caret != std::string::npos) {
      const double base = std::stod(t.substr(0, caret));
      const int exponent = std::stoi(t.substr(caret + 1), &pos);
      if (pos != t.size() - caret - 1) throw std::invalid_argument(t);
      return std::pow(base, exponent);
    }
    const double v = std::stod(t, &pos);
    if (pos != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::logic_error&) {
    throw PreconditionError("bad length '" + text + "' (expected an integer or a^b)");
  }
}

std::size_t parse_count(const std::string& text) {
  const double v = parse_length(text);
  if (!(v >= 0.0) || v != std::floor(v) || v > 9.0e15) throw PreconditionError("bad count '" + text + "'");
  return static_cast<std::size_t>(v);
}

std::pair<int, int> parse_range(const std::string& text) {
  const std::string t = trim(text);
  try {
    if (const auto dots = t.find(".."); dots != std::string::npos) {
      return {std::stoi(t.substr(0, dots)), std::stoi(t.substr(dots + 2))};
    }
    const int v = std::stoi(t);
    return {v, v};
  } catch (const std::logic_error&) {
    throw PreconditionError("bad range '" + text + "' (expected lo..hi or k)");
  }
}

Past past_or_zeros(const std::string& text, int depth) {
  if (text.empty()) return Past::zeros(static_cast<std::size_t>(std::max(depth, 0)));
  Past past = Past::parse(text == "-" ? "" : text);
  past.require(depth, "the requested context depth");
  return past;
}

Bits read_bits_input(const std::string& path, const std::string& literal, const std::string& format,
                     std::optional<std::size_t> nbits) {
  if (!literal.empty() && !path.empty()) throw PreconditionError("give either --x or --in, not both");
  if (!literal.empty()) return parse_bits(literal == "-" ? "" : literal);
  if (path.empty()) throw PreconditionError("an input sequence is required (--x or --in)");
  if (format == "packed") {
    const std::string raw = read_file(path, true);
    std::span<const std::uint8_t> bytes(reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size());
    return unpack_bits(bytes, nbits.value_or(raw.size() * 8));
  }
  if (format != "ascii") throw PreconditionError("unknown input format '" + format + "' (ascii, packed)");
  std::string text;
  for (char c : read_file(path)) {
    if (c != ' ' && c != '\n' && c != '\r' && c != '\t') text += c;
  }
  return parse_bits(text);
}

std::string join_results(const CLI::Option* opt) {
  std::string out;
  for (const auto& r : opt->results()) {
    if (!out.empty()) out += ',';
    out += r;
  }
  return out;
}

// Every option of the subcommand as sorted key=value lines; output paths are
// left out so artifacts do not depend on where they are written.
std::string canonical_config(const CLI::App* sub) {
  std::vector<std::string> lines;
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "dump-config" || name == "out") continue;
    const std::string value = opt->count() ? join_results(opt) : opt->get_default_str();
    lines.push_back(name + "=" + value);
  }
  std::sort(lines.begin(), lines.end());
  std::string text = sub->get_name() + "\n";
  for (const auto& l : lines) text += l + "\n";
  return text;
}

ArtifactMeta meta_for(const CLI::App* sub, std::uint64_t seed) {
  ArtifactMeta meta;
  meta.command = sub->get_name();
  meta.seed = seed;
  meta.config_hash = config_hash(canonical_config(sub));
  return meta;
}

// MC slack in reports and summaries.
std::string fmt(double v) { return format_double(v); }

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void print_report(std::ostream& os, const lab::VerificationReport& r) {
  os << "verify " << r.lemma << ' ' << r.params << " trials=" << r.trials << " failures=" << r.failures
     << " empirical=" << short_num(r.empirical) << " bound=" << short_num(r.bound) << " slack=" << short_num(r.slack)
     << " verdict=" << verdict_label(r);
  if (!r.note.empty()) os << " note=\"" << r.note << '"';
  os << '\n';
}

struct Common {
  std::uint64_t seed = 1;
  bool dump_config = false;
};

void add_seed(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Root random seed");
}

}  // namespace

std::vector<std::string> apply_config(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw PreconditionError("--config needs a file");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty()) return rest;
  auto set_on_command_line = [&](const std::string& key) {
    for (const auto& a : rest) {
      if (a == "--" + key || a.rfind("--" + key + "=", 0) == 0) return true;
    }
    return false;
  };
  std::vector<std::string> spliced;
  std::istringstream in(read_file(path));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line.substr(0, line.find('#')));
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      // The first line of a dumped config names the subcommand.
      if (lineno == 1 || spliced.empty()) continue;
      throw PreconditionError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trim(t.substr(0, eq));
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw PreconditionError(path + ":" + std::to_string(lineno) + ": empty key");
    if (key == "lemma" || key == "name") {
      // Positionals are only taken from the command line.
      continue;
    }
    // An empty value keeps the default.
    if (value.empty()) continue;
    if (!set_on_command_line(key)) spliced.push_back("--" + key + "=" + value);
  }
  if (rest.empty()) return spliced;
  std::vector<std::string> out{rest.front()};
  out.insert(out.end(), spliced.begin(), spliced.end());
  out.insert(out.end(), rest.begin() + 1, rest.end());
  return out;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Universal coding and redundancy tools for binary Markov sources under a continuity condition", "mdelta"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  app.footer(
      "Every subcommand accepts --config FILE with key=value lines; command-line flags take precedence.\n"
      "Delta forms: poly:c exp:c dexp:c table:v0,v1,... const:v, with optional :raw and :cap=v suffixes.\n"
      "MDELTA_THREADS caps the number of worker threads.");

  std::function<void()> action;
  Common common;

  // ---- gen-source ----
  struct {
    std::string kind = "continuity";
    int ell = 3;
    double radius = 0.0625;
    std::string delta = "exp:1";
    double theta = 0.5;
    std::string out = "-";
  } gs;
  auto* gen = app.add_subcommand("gen-source", "Generate a Markov source (hypercube, continuity, iid)");
  gen->add_option("--kind", gs.kind, "hypercube | continuity | iid")
      ->check(CLI::IsMember({"hypercube", "continuity", "iid"}));
  gen->add_option("--ell", gs.ell, "Memory of the generated source");
  gen->add_option("--radius", gs.radius, "Hypercube half-width around 1/2");
  gen->add_option("--delta", gs.delta, "Continuity rate for --kind continuity");
  gen->add_option("--theta", gs.theta, "Parameter of the iid source");
  gen->add_option("--out", gs.out, "Source file ('-' for stdout)");
  add_seed(gen, common);

  // ---- sample ----
  struct {
    std::string source;
    std::string past;
    std::string n;
    std::string out = "-";
  } sm;
  auto* samp = app.add_subcommand("sample", "Sample a sequence from a source file");
  samp->add_option("--source", sm.source, "Source file")->required();
  samp->add_option("--past", sm.past, "Past bits, oldest first (default: zeros)");
  samp->add_option("--n", sm.n, "Sequence length")->required();
  samp->add_option("--out", sm.out, "Output file of ASCII 0/1 ('-' for stdout)");
  add_seed(samp, common);

  // ---- encode / decode ----
  struct {
    std::string coder = "kt";
    int ell = 0;
    std::string past;
    std::string source;
    std::string in;
    std::string x;
    std::string format = "ascii";
    std::string n;
    std::string out;
  } cd;
  auto add_coder_options = [&](CLI::App* sub) {
    sub->add_option("--coder", cd.coder, "uniform | kt | mixture | nml | source")
        ->check(CLI::IsMember({"uniform", "kt", "mixture", "nml", "source"}));
    sub->add_option("--past", cd.past, "Past bits, oldest first (default: zeros)");
    sub->add_option("--source", cd.source, "Source file (for --coder source)");
  };
  auto* enc = app.add_subcommand("encode", "Arithmetic-code a binary sequence");
  add_coder_options(enc);
  enc->add_option("--ell", cd.ell, "Context depth of the coder");
  enc->add_option("--in", cd.in, "Input file");
  enc->add_option("--x", cd.x, "Input sequence given inline");
  enc->add_option("--format", cd.format, "Input file format: ascii | packed");
  enc->add_option("--n", cd.n, "Number of bits to read from a packed input");
  enc->add_option("--out", cd.out, "Stream file")->required();
  auto* dec = app.add_subcommand("decode", "Decode a stream written by encode");
  add_coder_options(dec);
  dec->add_option("--in", cd.in, "Stream file")->required();
  dec->add_option("--out", cd.out, "Output file of ASCII 0/1 ('-' for stdout)")->default_val("-");

  // ---- prob ----
  struct {
    std::string source;
    std::string past;
    std::string x;
    std::string in;
    std::string coder;
    int ell = 0;
  } pr;
  auto* prob = app.add_subcommand("prob", "log2 probability of a sequence under a source (and a coder)");
  prob->add_option("--source", pr.source, "Source file")->required();
  prob->add_option("--past", pr.past, "Past bits, oldest first (default: zeros)");
  prob->add_option("--x", pr.x, "Sequence given inline");
  prob->add_option("--in", pr.in, "File of ASCII 0/1");
  prob->add_option("--coder", pr.coder, "Also report log2 q and regret for this coder")
      ->check(CLI::IsMember({"uniform", "kt", "mixture", "nml", "source"}));
  prob->add_option("--ell", pr.ell, "Coder context depth");

  // ---- bounds ----
  struct {
    std::vector<std::string> n;
    std::string delta = "exp:1";
    std::string ell;
    std::string out = "bounds.csv";
  } bd;
  auto* bnd = app.add_subcommand("bounds", "Evaluate the redundancy bounds over a range of context depths");
  bnd->add_option("--n", bd.n, "Sequence lengths (comma separated, a^b allowed)")->required()->delimiter(',');
  bnd->add_option("--delta", bd.delta, "Continuity rate");
  bnd->add_option("--ell", bd.ell, "Depth range lo..hi (default 1..min(ceil(log2 n), 16))");
  bnd->add_option("--out", bd.out, "CSV output ('-' for stdout)");

  // ---- redundancy ----
  struct {
    std::string source;
    std::string past;
    std::string coder = "mixture";
    std::optional<int> ell;
    std::string n;
    std::string trials = "1000";
    bool exact = false;
    std::string out = "regret.csv";
  } rd;
  auto* red = app.add_subcommand("redundancy", "Average redundancy of a coder against a source");
  red->add_option("--source", rd.source, "Source file")->required();
  red->add_option("--past", rd.past, "Past bits, oldest first (default: zeros)");
  red->add_option("--coder", rd.coder, "uniform | kt | mixture | nml | source")
      ->check(CLI::IsMember({"uniform", "kt", "mixture", "nml", "source"}));
  red->add_option("--ell", rd.ell, "Coder context depth (default: source memory)");
  red->add_option("--n", rd.n, "Sequence length")->required();
  red->add_option("--trials", rd.trials, "Monte Carlo sequences");
  red->add_flag("--exact", rd.exact, "Enumerate all 2^n sequences instead of sampling");
  red->add_option("--out", rd.out, "Per-sequence regret CSV for Monte Carlo runs ('-' for stdout)");
  add_seed(red, common);

  // ---- nml ----
  struct {
    int ell = 0;
    int n = 0;
    std::string past;
    int cap = kDefaultEnumerationCap;
  } nm;
  auto* nml = app.add_subcommand("nml", "Exact Shtarkov sum (worst-case minimax regret) by enumeration");
  nml->add_option("--ell", nm.ell, "Context depth");
  nml->add_option("--n", nm.n, "Sequence length")->required();
  nml->add_option("--past", nm.past, "Past bits, oldest first (default: zeros)");
  nml->add_option("--cap", nm.cap, "Largest n enumerated");

  // ---- verify ----
  struct {
    std::string lemma;
    std::string n;
    int ell = 2;
    double q = 0.3;
    double radius = 0.0625;
    std::string trials = "0";
    double gamma = 5.0;
    std::string rule = "all";
    std::size_t processes = 200;
    std::size_t count = 100;
    std::string delta = "exp:1";
    int memory = 4;
    double trial_scale = 1.0;
    std::string out = "verify.csv";
  } vf;
  auto* ver = app.add_subcommand("verify", "Run a lemma verification harness (or all of them)");
  ver->add_option("lemma", vf.lemma,
                  "all | domination | state-count | inv-count | mse | azuma | deviation | truncation | chaining")
      ->required()
      ->check(CLI::IsMember({"all", "domination", "state-count", "inv-count", "mse", "azuma", "deviation",
                             "truncation", "chaining"}));
  auto* vf_n = ver->add_option("--n", vf.n, "Sequence length");
  auto* vf_ell = ver->add_option("--ell", vf.ell, "Context depth");
  ver->add_option("--q", vf.q, "Floor of the conditional probabilities (domination)");
  ver->add_option("--radius", vf.radius, "Hypercube half-width");
  ver->add_option("--trials", vf.trials, "Monte Carlo trials (0 = automatic)");
  ver->add_option("--gamma", vf.gamma, "Deviation level (azuma)");
  ver->add_option("--rule", vf.rule, "Stopping rule: all | fixed | first-passage | random-time")
      ->check(CLI::IsMember({"all", "fixed", "first-passage", "random-time"}));
  ver->add_option("--processes", vf.processes, "Random processes (domination)");
  ver->add_option("--count", vf.count, "Sources (truncation, chaining)");
  ver->add_option("--delta", vf.delta, "Continuity rate (deviation, truncation, chaining)");
  ver->add_option("--memory", vf.memory, "Source memory (deviation)");
  ver->add_option("--trial-scale", vf.trial_scale, "Multiplier on the suite's trial counts (all)");
  ver->add_option("--out", vf.out, "CSV output ('-' for stdout)");
  add_seed(ver, common);

  // ---- experiment ----
  struct {
    std::string name;
    std::vector<std::string> n{"2^10", "2^12", "2^14"};
    std::string delta = "exp:1";
    std::size_t sources = 50;
    std::size_t trials = 32;
    std::string coder = "mixture";
    std::optional<int> ell;
    std::string regime = "all";
    std::string out;
  } ex;
  auto* exp = app.add_subcommand("experiment", "Experiment drivers: redundancy-vs-n, optimal-ell");
  exp->add_option("name", ex.name, "redundancy-vs-n | optimal-ell")
      ->required()
      ->check(CLI::IsMember({"redundancy-vs-n", "optimal-ell"}));
  exp->add_option("--n", ex.n, "Sequence lengths (comma separated, a^b allowed)")->delimiter(',');
  exp->add_option("--delta", ex.delta, "Continuity rate");
  exp->add_option("--sources", ex.sources, "Hypercube sources per n");
  exp->add_option("--trials", ex.trials, "Sequences per source");
  exp->add_option("--coder", ex.coder, "Coder measured")
      ->check(CLI::IsMember({"uniform", "kt", "mixture", "nml"}));
  exp->add_option("--ell", ex.ell, "Fixed coder depth (default: optimum of the refined bound)");
  exp->add_option("--regime", ex.regime, "all | lower | truncation | refined (optimal-ell)")
      ->check(CLI::IsMember({"all", "lower", "truncation", "refined"}));
  exp->add_option("--out", ex.out, "CSV output (default <name>.csv, '-' for stdout)");
  add_seed(exp, common);

  for (CLI::App* sub : {gen, samp, enc, dec, prob, bnd, red, nml, ver, exp}) {
    sub->add_flag("--dump-config", common.dump_config,
                  "Print the effective configuration as key=value lines and exit");
  }

  try {
    std::vector<std::string> args = apply_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  CLI::App* active = app.get_subcommands().front();
  if (common.dump_config) {
    out << canonical_config(active);
    return kExitOk;
  }

  try {
    if (*gen) {
      MarkovSource source = MarkovSource::iid(0.5);
      const DeltaSpec delta = DeltaSpec::parse(gs.delta);
      if (gs.kind == "hypercube") {
        source = gen_hypercube(gs.ell, gs.radius, common.seed);
      } else if (gs.kind == "continuity") {
        source = gen_continuity(gs.ell, delta, common.seed);
      } else {
        source = MarkovSource::iid(gs.theta);
      }
      const bool continuous = check_continuity(source, delta).passed();
      Output o(gs.out, out);
      std::ostringstream comment;
      comment << "mdelta " << kVersion << " gen-source kind=" << gs.kind << " seed=" << common.seed
              << " config_hash=" << meta_for(gen, common.seed).config_hash;
      o.stream() << format_source(source, comment.str());
      o.close();
      (o.is_stdout() ? err : out) << "gen-source kind=" << gs.kind << " memory=" << source.memory()
                                  << " leaves=" << source.tree().size() << " continuity(" << delta.to_string()
                                  << ")=" << (continuous ? "pass" : "fail") << " out=" << gs.out << '\n';
    } else if (*samp) {
      const MarkovSource source = read_source_file(sm.source);
      const Past past = past_or_zeros(sm.past, source.memory());
      const Bits x = sample(source, past, parse_count(sm.n), common.seed);
      Output o(sm.out, out);
      o.stream() << format_bits(x) << '\n';
      o.close();
      const auto ones = std::count(x.begin(), x.end(), Bit{1});
      (o.is_stdout() ? err : out) << "sample n=" << x.size() << " ones=" << ones
                                  << " log2p=" << fmt(log_prob(source, past, x)) << " out=" << sm.out << '\n';
    } else if (*enc || *dec) {
      const CoderKind kind = parse_coder_kind(cd.coder);
      std::optional<MarkovSource> source;
      if (!cd.source.empty()) source = read_source_file(cd.source);
      if (kind == CoderKind::Source && !source) throw PreconditionError("--coder source needs --source");
      if (*enc) {
        std::optional<std::size_t> nbits;
        if (!cd.n.empty()) nbits = parse_count(cd.n);
        const Bits x = read_bits_input(cd.in, cd.x, cd.format, nbits);
        if (x.size() > 0xffffffffULL) throw PreconditionError("sequence too long for the stream header");
        if (cd.ell < 0 || cd.ell > 255) throw PreconditionError("--ell must lie in [0, 255]");
        const int depth = kind == CoderKind::Source ? source->memory() : cd.ell;
        const Past past = past_or_zeros(cd.past, depth);
        auto coder = make_coder(kind, cd.ell, past, x.size(), source ? &*source : nullptr);
        const Bits code = encode(*coder, x);
        const double ideal = -log2_prob(*coder, x);
        Stream stream;
        stream.header.ell = static_cast<std::uint8_t>(cd.ell);
        stream.header.n = static_cast<std::uint32_t>(x.size());
        stream.codeword = code;
        const auto bytes = write_stream(stream);
        Output o(cd.out, out, true);
        o.stream().write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        o.close();
        (o.is_stdout() ? err : out) << "encode n=" << x.size() << " ell=" << cd.ell << " coder=" << cd.coder
                                    << " bits=" << code.size() << " bytes=" << bytes.size()
                                    << " ideal=" << fmt(ideal) << " out=" << cd.out << '\n';
      } else {
        const std::string raw = read_file(cd.in, true);
        const Stream stream =
            read_stream(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()));
        const int ell = stream.header.ell;
        const int depth = kind == CoderKind::Source ? source->memory() : ell;
        const Past past = past_or_zeros(cd.past, depth);
        auto coder = make_coder(kind, ell, past, stream.header.n, source ? &*source : nullptr);
        const Bits x = decode(*coder, stream.codeword, stream.header.n);
        Output o(cd.out, out);
        o.stream() << format_bits(x) << '\n';
        o.close();
        (o.is_stdout() ? err : out) << "decode n=" << x.size() << " ell=" << ell << " coder=" << cd.coder
                                    << " bits=" << stream.codeword.size() << " out=" << cd.out << '\n';
      }
    } else if (*prob) {
      const MarkovSource source = read_source_file(pr.source);
      const Bits x = read_bits_input(pr.in, pr.x, "ascii", std::nullopt);
      const int depth = std::max(source.memory(), pr.coder.empty() ? 0 : pr.ell);
      const Past past = past_or_zeros(pr.past, depth);
      const double lp = log_prob(source, past, x);
      out << "prob n=" << x.size() << " log2p=" << fmt(lp);
      if (!pr.coder.empty()) {
        auto coder = make_coder(parse_coder_kind(pr.coder), pr.ell, past, x.size(), &source);
        const double lq = log2_prob(*coder, x);
        out << " coder=" << pr.coder << " ell=" << pr.ell << " log2q=" << fmt(lq) << " regret=" << fmt(lp - lq);
      }
      out << '\n';
    } else if (*bnd) {
      const DeltaSpec delta = DeltaSpec::parse(bd.delta);
      std::vector<bounds::BoundReport> reports;
      for (const auto& text : bd.n) {
        const double n = parse_length(text);
        auto [lo, hi] = bd.ell.empty() ? std::pair{1, bounds::default_ell_max(n)} : parse_range(bd.ell);
        reports.push_back(bounds::bound_report(n, delta, lo, hi));
      }
      Output o(bd.out, out);
      write_bounds_csv(o.stream(), meta_for(bnd, 0), reports);
      o.close();
      auto& s = o.is_stdout() ? err : out;
      for (const auto& r : reports) {
        s << "bounds n=" << fmt(r.n) << " delta=" << delta.to_string() << " rows=" << r.rows.size()
          << " argmax_lb_t1=" << r.argmax_lower << " argmin_ub_prop=" << r.argmin_truncation
          << " argmin_ub_t12=" << r.argmin_refined << " lb_below_ub=" << (r.lower_below_upper ? 1 : 0)
          << " out=" << bd.out << '\n';
      }
    } else if (*red) {
      const MarkovSource source = read_source_file(rd.source);
      const CoderKind kind = parse_coder_kind(rd.coder);
      const int ell = rd.ell.value_or(source.memory());
      const std::size_t n = parse_count(rd.n);
      const Past past = past_or_zeros(rd.past, std::max(ell, source.memory()));
      auto coder = make_coder(kind, ell, past, n, &source);
      if (rd.exact) {
        if (n > static_cast<std::size_t>(kDefaultEnumerationCap)) {
          throw EnumerationCapError("exact redundancy enumerates 2^n sequences; n must be <= " +
                                    std::to_string(kDefaultEnumerationCap));
        }
        const double value = exact_avg_redundancy(source, past, *coder, static_cast<int>(n));
        out << "redundancy mode=exact n=" << n << " coder=" << rd.coder << " ell=" << ell
            << " mean=" << fmt(value) << '\n';
      } else {
        const McEstimate est = mc_avg_redundancy(source, past, *coder, n, parse_count(rd.trials), common.seed,
                                                 true, ell);
        Output o(rd.out, out);
        write_regret_csv(o.stream(), meta_for(red, common.seed), est.samples);
        o.close();
        (o.is_stdout() ? err : out) << "redundancy mode=mc n=" << n << " coder=" << rd.coder << " ell=" << ell
                                    << " trials=" << est.trials << " mean=" << fmt(est.mean)
                                    << " se=" << fmt(est.standard_error) << " out=" << rd.out << '\n';
      }
    } else if (*nml) {
      const Past past = past_or_zeros(nm.past, nm.ell);
      const ShtarkovResult r = shtarkov_oracle(nm.ell, past, nm.n, false, nm.cap);
      out << "nml ell=" << nm.ell << " n=" << nm.n << " past=" << (past.size() ? format_bits(past.bits()) : "-")
          << " sum=" << fmt(r.sum) << " log2_sum=" << fmt(r.log2_sum) << '\n';
    } else if (*ver) {
      std::vector<lab::VerificationReport> reports;
      const std::uint64_t seed = common.seed;
      const DeltaSpec delta = DeltaSpec::parse(vf.delta);
      auto n_or = [&](std::size_t fallback) { return vf_n->count() ? parse_count(vf.n) : fallback; };
      auto ell_or = [&](int fallback) { return vf_ell->count() ? vf.ell : fallback; };
      auto trials_or = [&](double bound, std::size_t n) {
        const std::size_t t = parse_count(vf.trials);
        return t ? t : lab::auto_trials(bound, n);
      };
      const std::string& lemma = vf.lemma;
      if (lemma == "all") {
        reports = lab::default_suite(seed, vf.trial_scale);
      } else if (lemma == "domination") {
        reports.push_back(lab::verify_domination(static_cast<int>(n_or(12)), vf.q, vf.processes, seed));
      } else if (lemma == "state-count") {
        const std::size_t n = n_or(1u << 14);
        reports.push_back(lab::verify_state_count(ell_or(2), vf.radius, n, trials_or(1.0 / n, n), seed));
      } else if (lemma == "inv-count") {
        const std::size_t n = n_or(1u << 12);
        const int ell = ell_or(2);
        const double bound = 2.0 * ell * std::ldexp(1.0, ell + 1) / static_cast<double>(n);
        reports.push_back(lab::estimate_inv_ns(ell, vf.radius, n, trials_or(bound, n), seed).report);
      } else if (lemma == "mse") {
        const std::size_t n = n_or(1u << 12);
        const std::size_t t = parse_count(vf.trials);
        reports.push_back(lab::verify_mse(ell_or(2), vf.radius, n, t ? t : 10000, seed));
      } else if (lemma == "azuma") {
        const std::size_t n = n_or(100);
        std::vector<lab::StoppingRule> rules;
        if (vf.rule == "all") {
          rules = {lab::StoppingRule::Fixed, lab::StoppingRule::FirstPassage, lab::StoppingRule::RandomTime};
        } else {
          rules = {lab::parse_stopping_rule(vf.rule)};
        }
        for (auto rule : rules) {
          const double bound = (rule == lab::StoppingRule::Fixed ? 1.0 : static_cast<double>(n)) *
                               std::exp(-vf.gamma * vf.gamma / 2.0);
          reports.push_back(lab::verify_azuma_stopped(n, vf.gamma, trials_or(bound, n),
                                                      derive_seed(seed, lab::to_string(rule)), rule));
        }
      } else if (lemma == "deviation") {
        const std::size_t n = n_or(1u << 12);
        const int ell = ell_or(2);
        const MarkovSource source = gen_continuity(vf.memory, delta, derive_seed(seed, "deviation:source"));
        const Past past = Past::zeros(static_cast<std::size_t>(std::max(ell, vf.memory)));
        const double bound = std::ldexp(1.0, ell) / std::pow(static_cast<double>(n), 3.0);
        reports.push_back(lab::verify_deviation(source, past, ell, n, trials_or(bound, n), seed));
      } else if (lemma == "truncation") {
        reports.push_back(lab::verify_truncation_batch(ell_or(3), delta, n_or(4096), vf.count, seed));
      } else if (lemma == "chaining") {
        reports.push_back(lab::verify_chaining_batch(ell_or(3), delta, n_or(4096), vf.count, seed));
      }
      Output o(vf.out, out);
      write_verify_csv(o.stream(), meta_for(ver, seed), reports);
      o.close();
      auto& s = o.is_stdout() ? err : out;
      bool ok = true;
      for (const auto& r : reports) {
        print_report(s, r);
        ok = ok && r.passed;
      }
      if (!ok) throw VerificationFailed("at least one verification failed");
    } else if (*exp) {
      const DeltaSpec delta = DeltaSpec::parse(ex.delta);
      std::vector<double> ns;
      for (const auto& t : ex.n) ns.push_back(parse_length(t));
      const std::string path = ex.out.empty() ? ex.name + ".csv" : ex.out;
      const ArtifactMeta meta = meta_for(exp, common.seed);
      if (ex.name == "redundancy-vs-n") {
        RedundancyPointOptions opts;
        opts.sources = ex.sources;
        opts.trials = ex.trials;
        opts.coder = parse_coder_kind(ex.coder);
        opts.seed = common.seed;
        opts.ell = ex.ell;
        const auto points = redundancy_vs_n(ns, delta, opts);
        Output o(path, out);
        CsvWriter csv(o.stream(), meta,
                      {"n", "ell", "memory", "radius", "sources", "trials", "avg_regret", "max_regret", "ub_t12",
                       "ub_t12_safe", "ub_prop", "lb_t1", "all_within"});
        std::vector<double> xs, avg, bound;
        for (const auto& p : points) {
          csv.row({fmt(p.n), std::to_string(p.ell), std::to_string(p.memory), fmt(p.radius),
                   std::to_string(p.per_source.size()), std::to_string(ex.trials), fmt(p.avg_mean), fmt(p.max_mean),
                   fmt(p.refined), fmt(p.refined_safe), fmt(p.truncation), fmt(p.lower), p.all_within ? "1" : "0"});
          xs.push_back(p.n);
          avg.push_back(p.avg_mean);
          bound.push_back(p.refined);
        }
        o.close();
        auto& s = o.is_stdout() ? err : out;
        bool ok = true;
        for (const auto& p : points) {
          s << "experiment redundancy-vs-n n=" << fmt(p.n) << " ell=" << p.ell << " memory=" << p.memory
            << " avg_regret=" << short_num(p.avg_mean) << " max_regret=" << short_num(p.max_mean)
            << " ub_t12=" << short_num(p.refined) << " within=" << (p.all_within ? 1 : 0) << '\n';
          ok = ok && p.all_within;
        }
        s << "experiment redundancy-vs-n slope_log_regret=" << short_num(log_log_slope(xs, avg))
          << " slope_log_ub_t12=" << short_num(log_log_slope(xs, bound)) << " out=" << path << '\n';
        if (!ok) throw VerificationFailed("measured redundancy exceeded the refined bound");
      } else {
        std::vector<bounds::Regime> regimes;
        if (ex.regime == "all") {
          regimes = {bounds::Regime::Lower, bounds::Regime::Truncation, bounds::Regime::Refined};
        } else {
          regimes = {bounds::parse_regime(ex.regime)};
        }
        std::sort(ns.begin(), ns.end());
        Output o(path, out);
        CsvWriter csv(o.stream(), meta,
                      {"n", "delta", "regime", "prescribed_real", "prescribed", "scanned", "scanned_value",
                       "prescribed_value"});
        auto& s = o.is_stdout() ? err : out;
        for (double n : ns) {
          for (auto regime : regimes) {
            const auto c = bounds::optimal_ell(n, delta, regime);
            const std::string pv = c.prescribed ? fmt(bounds::regime_bound(regime, n, *c.prescribed, delta)) : "";
            csv.row({fmt(n), delta.to_string(), bounds::to_string(regime),
                     c.prescribed_real ? fmt(*c.prescribed_real) : "", c.prescribed ? std::to_string(*c.prescribed) : "",
                     std::to_string(c.scanned), fmt(c.scanned_value), pv});
            s << "experiment optimal-ell n=" << fmt(n) << " regime=" << bounds::to_string(regime)
              << " prescribed=" << (c.prescribed ? std::to_string(*c.prescribed) : "none")
              << " scanned=" << c.scanned << " value=" << short_num(c.scanned_value) << '\n';
          }
        }
        o.close();
      }
    }
  } catch (const VerificationFailed& e) {
    err << "verification failed: " << e.what() << '\n';
    return kExitVerificationFailed;
  } catch (const std::invalid_argument& e) {  // PreconditionError and friends
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const DecodeError& e) {
    err << "decode error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitVerificationFailed;
  }
  return kExitOk;
}

}  // namespace mdelta::cli
