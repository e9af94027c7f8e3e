#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "finito/io.hpp"

namespace finito::io {
namespace {

std::string_view init_name(Initialization init) {
  return init == Initialization::FirstPass ? "first-pass" : "all-equal";
}

Initialization parse_init(std::string_view name, std::size_t line) {
  if (name == "first-pass") return Initialization::FirstPass;
  if (name == "all-equal") return Initialization::AllEqual;
  throw ParseError("unknown initialization '" + std::string(name) + "'", line);
}

void write_row(std::ostream& out, const auto& row) {
  for (Index j = 0; j < row.size(); ++j) {
    if (j != 0) out << ' ';
    out << format_hex(row[j]);
  }
  out << '\n';
}

void write_table(std::ostream& out, std::string_view name, const Matrix& table) {
  out << "table " << name << ' ' << table.rows() << '\n';
  for (Index i = 0; i < table.rows(); ++i) write_row(out, table.row(i));
}

void write_seen(std::ostream& out, const std::vector<std::uint8_t>& seen) {
  out << "seen ";
  for (auto flag : seen) out << (flag ? '1' : '0');
  out << '\n';
}

// Line-oriented reader for the checkpoint body.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::size_t line() const { return line_; }

  std::string next_line(std::string_view expect) {
    std::string text;
    if (!std::getline(in_, text))
      throw ParseError("truncated checkpoint: expected " + std::string(expect), line_ + 1);
    ++line_;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    return text;
  }

  /// Reads "key value" and returns value.
  std::string value(std::string_view key) {
    const std::string text = next_line(std::string(key));
    const auto space = text.find(' ');
    if (text.substr(0, space) != key)
      throw ParseError("expected key '" + std::string(key) + "', found '" + text + "'",
                       line_);
    return space == std::string::npos ? std::string{} : text.substr(space + 1);
  }

  std::uint64_t integer(std::string_view key) {
    const std::string v = value(key);
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
      throw ParseError("key '" + std::string(key) + "' needs an integer, found '" + v + "'",
                       line_);
    return out;
  }

  double hex(std::string_view key) {
    const std::string v = value(key);
    return parse_hex_at(v, 1);
  }

  Vector vector(std::string_view key, Index d) {
    return parse_row(value(key), d, std::string(key).size() + 2);
  }

  Matrix table(std::string_view name, Index n, Index d) {
    const std::string header = value("table");
    const std::string expected = std::string(name) + ' ' + std::to_string(n);
    if (header != expected)
      throw ParseError("expected table '" + expected + "', found '" + header + "'", line_);
    Matrix out(n, d);
    for (Index i = 0; i < n; ++i)
      out.row(i) = parse_row(next_line("table row"), d, 1).transpose();
    return out;
  }

  std::vector<std::uint8_t> seen(Index n) {
    const std::string v = value("seen");
    if (static_cast<Index>(v.size()) != n)
      throw ParseError("seen mask has " + std::to_string(v.size()) + " entries, expected " +
                           std::to_string(n),
                       line_);
    std::vector<std::uint8_t> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] != '0' && v[i] != '1')
        throw ParseError("seen mask must be 0/1", line_, i + 6);
      out[i] = v[i] == '1';
    }
    return out;
  }

 private:
  double parse_hex_at(std::string_view token, std::size_t column) {
    try {
      return parse_hex(token);
    } catch (const InvalidArgument&) {
      throw ParseError("corrupt hexadecimal literal '" + std::string(token) + "'", line_,
                       column);
    }
  }

  Vector parse_row(std::string_view text, Index d, std::size_t column) {
    Vector out(d);
    std::size_t pos = 0;
    for (Index j = 0; j < d; ++j) {
      while (pos < text.size() && text[pos] == ' ') ++pos;
      const std::size_t start = pos;
      while (pos < text.size() && text[pos] != ' ') ++pos;
      if (start == pos)
        throw ParseError("row has " + std::to_string(j) + " values, expected " +
                             std::to_string(d),
                         line_);
      out[j] = parse_hex_at(text.substr(start, pos - start), column + start);
    }
    while (pos < text.size() && text[pos] == ' ') ++pos;
    if (pos != text.size())
      throw ParseError("row has more than " + std::to_string(d) + " values", line_,
                       column + pos);
    return out;
  }

  std::istream& in_;
  std::size_t line_ = 0;
};

}  // namespace

std::string format_hex(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  char* p = buf;
  if (std::signbit(x)) {
    *p++ = '-';
    x = -x;
  }
  *p++ = '0';
  *p++ = 'x';
  const auto [end, ec] = std::to_chars(p, buf + sizeof(buf), x, std::chars_format::hex);
  if (ec != std::errc()) throw Error("cannot format hex double");
  return std::string(buf, end);
}

double parse_hex(std::string_view text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  bool negative = false;
  if (!text.empty() && text.front() == '-') {
    negative = true;
    text.remove_prefix(1);
  }
  if (text.size() < 3 || text[0] != '0' || (text[1] != 'x' && text[1] != 'X'))
    throw InvalidArgument("hex literal must start with 0x");
  text.remove_prefix(2);
  double v = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), v, std::chars_format::hex);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw InvalidArgument("malformed hex literal");
  return negative ? -v : v;
}

Checkpoint capture(const Runner& runner) {
  Checkpoint ckpt;
  ckpt.config = runner.config();
  ckpt.steps = runner.steps();
  ckpt.sampler_draws = runner.sampler().draws();
  ckpt.state = runner.state();
  return ckpt;
}

Runner resume(const FiniteSumProblem& problem, const Checkpoint& checkpoint,
              SolverConfig config, const ReferenceSolution* reference) {
  config.solver = checkpoint.config.solver;
  config.alpha = checkpoint.config.alpha;
  config.step = checkpoint.config.step;
  config.sag_practical_step = checkpoint.config.sag_practical_step;
  config.sampling = checkpoint.config.sampling;
  config.init = checkpoint.config.init;
  config.audit = checkpoint.config.audit;
  return Runner(problem, std::move(config), reference, checkpoint.state, checkpoint.steps,
                checkpoint.sampler_draws);
}

void checkpoint_save(std::ostream& out, const Checkpoint& ckpt) {
  const SolverConfig& cfg = ckpt.config;
  out << "FINITOCKPT " << ckpt.format_version << '\n';
  out << "solver " << to_string(cfg.solver) << '\n';
  out << "sampling " << to_string(cfg.sampling) << '\n';
  out << "seed " << cfg.sampling.seed << '\n';
  out << "init " << init_name(cfg.init) << '\n';
  out << "steps " << ckpt.steps << '\n';
  out << "draws " << ckpt.sampler_draws << '\n';

  std::visit(
      [&](const auto& st) {
        using T = std::decay_t<decltype(st)>;
        const Index d = st.w.size();
        if constexpr (std::is_same_v<T, FinitoState>) {
          out << "n " << st.n() << '\n' << "d " << d << '\n';
          out << "alpha " << format_hex(st.alpha) << '\n';
          out << "s " << format_hex(st.s) << '\n';
          out << "l1 " << format_hex(st.l1_weight) << '\n';
          out << "k " << st.k << '\n';
          out << "audit " << (st.audit ? 1 : 0) << '\n';
          out << "seen_count " << st.seen_count << '\n';
          write_seen(out, st.seen);
          out << "sum ";
          write_row(out, st.p_sum);
          out << "w ";
          write_row(out, st.w);
          write_table(out, "p", st.p_table);
          if (st.audit) {
            write_table(out, "phi", st.phi_table);
            write_table(out, "grad", st.grad_table);
          }
        } else if constexpr (std::is_same_v<T, SagState>) {
          out << "n " << st.n() << '\n' << "d " << d << '\n';
          out << "step " << format_hex(st.step) << '\n';
          out << "k " << st.k << '\n';
          out << "seen_count " << st.seen_count << '\n';
          write_seen(out, st.seen);
          out << "sum ";
          write_row(out, st.grad_sum);
          out << "w ";
          write_row(out, st.w);
          write_table(out, "grad", st.grad_table);
        } else {
          out << "n 0\n" << "d " << d << '\n';
          out << "step " << format_hex(st.step) << '\n';
          out << "k " << st.k << '\n';
          out << "w ";
          write_row(out, st.w);
        }
      },
      ckpt.state);
  out << "end\n";
}

Checkpoint checkpoint_load(std::istream& in, const FiniteSumProblem& problem) {
  Reader r(in);
  {
    const std::string magic = r.next_line("FINITOCKPT header");
    if (magic.rfind("FINITOCKPT ", 0) != 0)
      throw ParseError("not a checkpoint (missing FINITOCKPT header)", 1);
    if (magic != "FINITOCKPT " + std::to_string(kCheckpointVersion))
      throw ParseError("unsupported checkpoint version '" + magic.substr(11) +
                           "', expected " + std::to_string(kCheckpointVersion),
                       1);
  }
  Checkpoint ckpt;
  SolverConfig& cfg = ckpt.config;
  try {
    cfg.solver = parse_solver(r.value("solver"));
    const std::string sampling = r.value("sampling");
    const std::uint64_t seed = r.integer("seed");
    cfg.sampling = parse_sampling(sampling, seed);
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what(), r.line());
  }
  cfg.init = parse_init(r.value("init"), r.line());
  ckpt.steps = r.integer("steps");
  ckpt.sampler_draws = r.integer("draws");

  const auto n = static_cast<Index>(r.integer("n"));
  const auto d = static_cast<Index>(r.integer("d"));
  const bool full = cfg.solver == SolverKind::FullGradient;
  if (d != problem.d() || (!full && n != problem.n()))
    throw InvalidArgument("checkpoint dimensions (n=" + std::to_string(n) + ", d=" +
                          std::to_string(d) + ") do not match problem (n=" +
                          std::to_string(problem.n()) + ", d=" +
                          std::to_string(problem.d()) + ")");

  switch (cfg.solver) {
    case SolverKind::Finito:
    case SolverKind::ProxFinito:
    case SolverKind::Miso: {
      FinitoState st;
      st.variant = cfg.solver == SolverKind::Finito       ? FinitoVariant::Finito
                   : cfg.solver == SolverKind::ProxFinito ? FinitoVariant::ProxFinito
                                                          : FinitoVariant::Miso;
      st.alpha = r.hex("alpha");
      st.s = r.hex("s");
      st.l1_weight = r.hex("l1");
      st.k = r.integer("k");
      st.audit = r.integer("audit") != 0;
      st.seen_count = static_cast<Index>(r.integer("seen_count"));
      st.seen = r.seen(n);
      st.p_sum = r.vector("sum", d);
      st.w = r.vector("w", d);
      st.p_table = r.table("p", n, d);
      if (st.audit) {
        st.phi_table = r.table("phi", n, d);
        st.grad_table = r.table("grad", n, d);
      }
      cfg.alpha = st.alpha;
      cfg.audit = st.audit;
      ckpt.state = std::move(st);
      break;
    }
    case SolverKind::Sag: {
      SagState st;
      st.step = r.hex("step");
      st.k = r.integer("k");
      st.seen_count = static_cast<Index>(r.integer("seen_count"));
      st.seen = r.seen(n);
      st.grad_sum = r.vector("sum", d);
      st.w = r.vector("w", d);
      st.grad_table = r.table("grad", n, d);
      cfg.step = st.step;
      ckpt.state = std::move(st);
      break;
    }
    case SolverKind::FullGradient: {
      FullGradientState st;
      st.step = r.hex("step");
      st.k = r.integer("k");
      st.w = r.vector("w", d);
      cfg.step = st.step;
      ckpt.state = std::move(st);
      break;
    }
  }
  if (r.next_line("end") != "end")
    throw ParseError("expected 'end' after tables", r.line());
  return ckpt;
}

}  // namespace finito::io
