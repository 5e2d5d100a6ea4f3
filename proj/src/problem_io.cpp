#include "borelsum/problem_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace borelsum {

namespace {

struct Line {
  int number = 0;
  std::string key;
  std::vector<std::string> tokens;
};

struct Section {
  std::string name;
  int number = 0;
  std::vector<Line> lines;
};

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  throw validation_error(origin + ":" + std::to_string(line) + ": " + msg);
}

std::vector<Section> tokenize(const std::string& text, const std::string& origin) {
  std::vector<Section> sections;
  sections.push_back({"", 0, {}});
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    std::istringstream ls(raw);
    std::string first;
    if (!(ls >> first)) continue;
    if (first.front() == '[') {
      std::string name = raw;
      name.erase(0, name.find('[') + 1);
      const auto close = name.find(']');
      if (close == std::string::npos) fail(origin, number, "unterminated section header");
      sections.push_back({name.substr(0, close), number, {}});
      continue;
    }
    Line line;
    line.number = number;
    line.key = first;
    std::string tok;
    ls >> tok;
    if (tok != "=") fail(origin, number, "expected '=' after key '" + first + "'");
    while (ls >> tok) line.tokens.push_back(tok);
    if (line.tokens.empty()) fail(origin, number, "no value for key '" + first + "'");
    sections.back().lines.push_back(std::move(line));
  }
  return sections;
}

double to_double(const std::string& origin, const Line& l, const std::string& tok) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    fail(origin, l.number, "field '" + l.key + "': bad number '" + tok + "'");
  }
}

int to_int(const std::string& origin, const Line& l, const std::string& tok) {
  const double v = to_double(origin, l, tok);
  if (v != std::floor(v)) fail(origin, l.number, "field '" + l.key + "': expected integer");
  return static_cast<int>(v);
}

cplx to_cplx(const std::string& origin, const Line& l) {
  if (l.tokens.size() != 2)
    fail(origin, l.number, "field '" + l.key + "': complex value needs 're im'");
  return {to_double(origin, l, l.tokens[0]), to_double(origin, l, l.tokens[1])};
}

ComplexPolynomial to_poly(const std::string& origin, const Line& l) {
  if (l.tokens.size() % 2 != 0)
    fail(origin, l.number, "field '" + l.key + "': coefficient list needs 're im' pairs");
  std::vector<cplx> c;
  for (std::size_t i = 0; i < l.tokens.size(); i += 2)
    c.emplace_back(to_double(origin, l, l.tokens[i]), to_double(origin, l, l.tokens[i + 1]));
  try {
    return ComplexPolynomial(std::move(c));
  } catch (const std::exception& e) {
    fail(origin, l.number, "field '" + l.key + "': " + e.what());
  }
}

}  // namespace

ProblemSpec parse_problem(const std::string& text, const std::string& origin) {
  ProblemSpec spec;
  bool have_q = false, have_rd = false, have_q1 = false, have_q2 = false;
  std::map<int, Level> levels;
  const auto sections = tokenize(text, origin);
  for (const auto& sec : sections) {
    if (sec.name.empty()) {
      for (const auto& l : sec.lines) {
        if (l.key == "k")
          spec.k = to_double(origin, l, l.tokens[0]);
        else if (l.key == "D")
          spec.D = to_int(origin, l, l.tokens[0]);
        else if (l.key == "alpha_D")
          spec.alpha_D = to_double(origin, l, l.tokens[0]);
        else if (l.key == "eps0")
          spec.eps0 = to_double(origin, l, l.tokens[0]);
        else if (l.key == "c12")
          spec.c12 = to_cplx(origin, l);
        else if (l.key == "cf")
          spec.cf = to_cplx(origin, l);
        else if (l.key == "max_index_set")
          spec.max_index_set = to_int(origin, l, l.tokens[0]);
        else
          fail(origin, l.number, "unknown top-level key '" + l.key + "'");
      }
    } else if (sec.name.rfind("poly.", 0) == 0) {
      const std::string which = sec.name.substr(5);
      for (const auto& l : sec.lines) {
        if (l.key != "coeffs") fail(origin, l.number, "polynomial sections take 'coeffs'");
        const ComplexPolynomial p = to_poly(origin, l);
        if (which == "Q") {
          spec.Q = p;
          have_q = true;
        } else if (which == "RD") {
          spec.RD = p;
          have_rd = true;
        } else if (which == "Q1") {
          spec.Q1 = p;
          have_q1 = true;
        } else if (which == "Q2") {
          spec.Q2 = p;
          have_q2 = true;
        } else {
          fail(origin, sec.number, "unknown polynomial '" + which + "'");
        }
      }
    } else if (sec.name.rfind("level.", 0) == 0) {
      const int idx = std::atoi(sec.name.substr(6).c_str());
      if (idx < 1) fail(origin, sec.number, "level index must be >= 1");
      Level& lv = levels[idx];
      lv.index = idx;
      for (const auto& l : sec.lines) {
        if (l.key == "c")
          lv.c = to_cplx(origin, l);
        else if (l.key == "d")
          lv.d = to_int(origin, l, l.tokens[0]);
        else if (l.key == "delta")
          lv.delta = to_int(origin, l, l.tokens[0]);
        else if (l.key == "Delta")
          lv.Delta = to_int(origin, l, l.tokens[0]);
        else if (l.key == "kappa")
          lv.kappa = to_double(origin, l, l.tokens[0]);
        else if (l.key == "R")
          lv.R = to_poly(origin, l);
        else if (l.key.rfind("A.", 0) == 0) {
          const int n = std::atoi(l.key.substr(2).c_str());
          lv.A.emplace_back(n, to_poly(origin, l));
        } else
          fail(origin, l.number, "unknown level key '" + l.key + "'");
      }
    } else if (sec.name == "forcing") {
      for (const auto& l : sec.lines) {
        if (l.key == "K0")
          spec.forcing.K0 = to_double(origin, l, l.tokens[0]);
        else if (l.key == "T0")
          spec.forcing.T0 = to_double(origin, l, l.tokens[0]);
        else if (l.key == "beta")
          spec.forcing.beta = to_double(origin, l, l.tokens[0]);
        else if (l.key == "mu")
          spec.forcing.mu = to_double(origin, l, l.tokens[0]);
        else
          fail(origin, l.number, "unknown forcing key '" + l.key + "'");
      }
    } else if (sec.name.rfind("forcing.mode.", 0) == 0) {
      ForcingMode mode;
      mode.n = std::atoi(sec.name.substr(13).c_str());
      if (mode.n < 1) fail(origin, sec.number, "forcing mode index must be >= 1");
      for (const auto& l : sec.lines) {
        if (l.key == "amplitude")
          mode.amplitude = to_double(origin, l, l.tokens[0]);
        else if (l.key == "mu_prime")
          mode.mu_prime = to_double(origin, l, l.tokens[0]);
        else if (l.key == "beta_prime")
          mode.beta_prime = to_double(origin, l, l.tokens[0]);
        else if (l.key == "modal") {
          if (l.tokens.size() != 2 || (l.tokens[0] != "cos" && l.tokens[0] != "sin"))
            fail(origin, l.number, "modal takes 'cos|sin omega'");
          mode.modal = l.tokens[0] == "cos" ? ModalKind::cosine : ModalKind::sine;
          mode.omega = to_double(origin, l, l.tokens[1]);
        } else if (l.key == "eps_poly")
          mode.eps_poly = to_poly(origin, l);
        else
          fail(origin, l.number, "unknown forcing mode key '" + l.key + "'");
      }
      if (mode.eps_poly.coeffs.empty()) mode.eps_poly = ComplexPolynomial({cplx(1.0, 0.0)});
      spec.forcing.modes.push_back(std::move(mode));
    } else {
      fail(origin, sec.number, "unknown section '" + sec.name + "'");
    }
  }
  if (!have_q) throw validation_error(origin + ": missing [poly.Q]");
  if (!have_rd) throw validation_error(origin + ": missing [poly.RD]");
  if (!have_q1) throw validation_error(origin + ": missing [poly.Q1]");
  if (!have_q2) throw validation_error(origin + ": missing [poly.Q2]");
  for (auto& [idx, lv] : levels) {
    if (lv.R.coeffs.empty()) fail(origin, 0, "level " + std::to_string(idx) + " missing R");
    spec.levels.push_back(std::move(lv));
  }
  std::sort(spec.levels.begin(), spec.levels.end(),
            [](const Level& a, const Level& b) { return a.index < b.index; });
  return spec;
}

ProblemSpec load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open problem file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str(), path);
}

ProblemSpec load_problem_validated(const std::string& path, const std::vector<double>& m_grid,
                                   bool force) {
  ProblemSpec spec = load_problem(path);
  const ValidationReport rep = validate_spec(spec, m_grid);
  if (!rep.passed() && !force)
    throw validation_error(path + ": hypothesis validation failed\n" + rep.summary());
  return spec;
}

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string poly_text(const ComplexPolynomial& p) {
  std::string s;
  for (const auto& c : p.coeffs) s += num(c.real()) + " " + num(c.imag()) + "  ";
  if (!s.empty()) s.pop_back();
  return s;
}

}  // namespace

std::string problem_to_text(const ProblemSpec& spec) {
  std::ostringstream os;
  os << "k = " << num(spec.k) << "\n";
  os << "D = " << spec.D << "\n";
  os << "alpha_D = " << num(spec.alpha_D) << "\n";
  os << "eps0 = " << num(spec.eps0) << "\n";
  os << "c12 = " << num(spec.c12.real()) << " " << num(spec.c12.imag()) << "\n";
  os << "cf = " << num(spec.cf.real()) << " " << num(spec.cf.imag()) << "\n";
  os << "max_index_set = " << spec.max_index_set << "\n";
  for (const auto& [name, poly] :
       {std::pair<std::string, const ComplexPolynomial*>{"Q", &spec.Q},
        {"RD", &spec.RD},
        {"Q1", &spec.Q1},
        {"Q2", &spec.Q2}}) {
    os << "\n[poly." << name << "]\ncoeffs = " << poly_text(*poly) << "\n";
  }
  for (const auto& lv : spec.levels) {
    os << "\n[level." << lv.index << "]\n";
    os << "c = " << num(lv.c.real()) << " " << num(lv.c.imag()) << "\n";
    os << "d = " << lv.d << "\ndelta = " << lv.delta << "\nDelta = " << lv.Delta << "\n";
    os << "kappa = " << num(lv.kappa) << "\n";
    os << "R = " << poly_text(lv.R) << "\n";
    for (const auto& [n, a] : lv.A) os << "A." << n << " = " << poly_text(a) << "\n";
  }
  os << "\n[forcing]\n";
  os << "K0 = " << num(spec.forcing.K0) << "\nT0 = " << num(spec.forcing.T0) << "\n";
  os << "beta = " << num(spec.forcing.beta) << "\nmu = " << num(spec.forcing.mu) << "\n";
  for (const auto& mode : spec.forcing.modes) {
    os << "\n[forcing.mode." << mode.n << "]\n";
    os << "amplitude = " << num(mode.amplitude) << "\n";
    os << "mu_prime = " << num(mode.mu_prime) << "\n";
    os << "beta_prime = " << num(mode.beta_prime) << "\n";
    os << "modal = " << (mode.modal == ModalKind::cosine ? "cos" : "sin") << " "
       << num(mode.omega) << "\n";
    os << "eps_poly = " << poly_text(mode.eps_poly) << "\n";
  }
  return os.str();
}

void save_problem(const ProblemSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << problem_to_text(spec);
}

}  // namespace borelsum
