#pragma once

// LP-format text for the model objects, plus a reader for the same dialect
// so exports can be verified by round-trip. Conventions making the
// round-trip exact:
//   * coefficients and bounds carry 17 significant digits,
//   * the Bounds section lists every variable in declaration order, so the
//     reader recovers the variable list without guessing,
//   * variable roles are reconstructed from the documented name patterns
//     (x<i>, y<i>_<j>, p<i>, w<n>, s<n>_<i>, r<n>, theta<l>).
// Hyperbolic rows are emitted in the quadratic-constraint syntax
// `name: [ r * w ] >= 1`.

#include <cctype>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcpr/instance.hpp"
#include "mcpr/model.hpp"

namespace mcpr {

namespace detail {

inline void write_terms(std::string& out, const MipModel& mdl,
                        const std::vector<LinearTerm>& terms, double offset) {
  bool first = true;
  for (const LinearTerm& t : terms) {
    double c = t.coeff;
    if (first) {
      if (c < 0) {
        out += "- ";
        c = -c;
      }
      first = false;
    } else {
      out += (c < 0) ? " - " : " + ";
      if (c < 0) c = -c;
    }
    out += fmt17(c);
    out += ' ';
    out += mdl.vars[t.var].name;
  }
  if (offset != 0) {
    double c = offset;
    if (first) {
      if (c < 0) {
        out += "- ";
        c = -c;
      }
    } else {
      out += (c < 0) ? " - " : " + ";
      if (c < 0) c = -c;
    }
    out += fmt17(c);
  }
}

inline const char* relation_text(Relation r) {
  switch (r) {
    case Relation::LessEq: return "<=";
    case Relation::GreaterEq: return ">=";
    case Relation::Equal: return "=";
  }
  return "?";
}

}  // namespace detail

inline std::string write_lp(const ConicModel& conic) {
  const MipModel& mdl = conic.mip;
  std::string out;
  out += "\\ Problem: " + mdl.name + "\n";
  out += "Maximize\n obj: ";
  detail::write_terms(out, mdl, mdl.objective, mdl.objective_offset);
  out += "\nSubject To\n";
  for (const LinearConstraint& c : mdl.cons) {
    out += ' ';
    out += c.name;
    out += ": ";
    detail::write_terms(out, mdl, c.terms, 0);
    out += ' ';
    out += detail::relation_text(c.rel);
    out += ' ';
    out += detail::fmt17(c.rhs);
    out += '\n';
  }
  for (const HyperbolicRow& h : conic.hyperbolic) {
    out += ' ';
    out += h.name;
    out += ": [ " + mdl.vars[h.r_var].name + " * " + mdl.vars[h.w_var].name + " ] >= " +
           detail::fmt17(h.rhs) + "\n";
  }
  out += "Bounds\n";
  for (const ModelVariable& v : mdl.vars) {
    double inf = std::numeric_limits<double>::infinity();
    out += ' ';
    if (v.lb == -inf && v.ub == inf) {
      out += v.name + " free";
    } else if (v.ub == inf) {
      out += detail::fmt17(v.lb) + " <= " + v.name;
    } else {
      out += detail::fmt17(v.lb) + " <= " + v.name + " <= " + detail::fmt17(v.ub);
    }
    out += '\n';
  }
  bool any_binary = false;
  for (const ModelVariable& v : mdl.vars) any_binary = any_binary || v.kind == VarKind::Binary;
  if (any_binary) {
    out += "Binaries\n";
    int on_line = 0;
    for (const ModelVariable& v : mdl.vars) {
      if (v.kind != VarKind::Binary) continue;
      out += (on_line == 0) ? " " : " ";
      out += v.name;
      if (++on_line == 10) {
        out += '\n';
        on_line = 0;
      }
    }
    if (on_line != 0) out += '\n';
  }
  out += "End\n";
  return out;
}

inline std::string write_lp(const MipModel& mdl) { return write_lp(ConicModel{mdl, {}}); }

namespace detail {

inline bool lp_number_token(const std::string& tok) {
  if (tok.empty()) return false;
  char c = tok[0];
  if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return true;
  if ((c == '-' || c == '+') && tok.size() > 1) return true;
  return tok == "inf" || tok == "-inf";
}

inline double lp_to_double(const std::string& tok) {
  const char* s = tok.c_str();
  char* end = nullptr;
  double v = std::strtod(s, &end);
  if (end == s || *end != '\0') throw std::runtime_error("lp read: bad number '" + tok + "'");
  return v;
}

// Role and indices from the writer's naming convention. Unknown patterns
// default to Select with no index, which keeps foreign-but-wellformed files
// readable.
inline void infer_role(ModelVariable& v) {
  const std::string& n = v.name;
  auto num = [](const std::string& s, std::size_t from, std::size_t to) {
    return std::atoi(s.substr(from, to - from).c_str());
  };
  std::size_t us = n.find('_');
  if (n.rfind("theta", 0) == 0) {
    v.role = VarRole::GroupValue;
    v.a = num(n, 5, n.size()) - 1;
  } else if (n[0] == 'x') {
    v.role = VarRole::Select;
    v.a = num(n, 1, n.size());
  } else if (n[0] == 'y' && us != std::string::npos) {
    v.role = VarRole::Edge;
    v.a = num(n, 1, us);
    v.b = num(n, us + 1, n.size());
  } else if (n[0] == 'p') {
    v.role = VarRole::Order;
    v.a = num(n, 1, n.size());
  } else if (n[0] == 'w') {
    v.role = VarRole::ZoneShare;
    v.a = num(n, 1, n.size()) - 1;
  } else if (n[0] == 's' && us != std::string::npos) {
    v.role = VarRole::ZoneSplit;
    v.a = num(n, 1, us) - 1;
    v.b = num(n, us + 1, n.size()) - 1;
  } else if (n[0] == 'r') {
    v.role = VarRole::ZoneRate;
    v.a = num(n, 1, n.size()) - 1;
  }
}

}  // namespace detail

inline ConicModel parse_lp(const std::string& text) {
  ConicModel conic;
  MipModel& mdl = conic.mip;

  // tokenize, keeping line structure for the Bounds section
  std::vector<std::vector<std::string>> lines;
  {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line[0] == '\\') {
        const std::string tag = "\\ Problem: ";
        if (line.rfind(tag, 0) == 0) mdl.name = line.substr(tag.size());
        continue;
      }
      std::istringstream ls(line);
      std::vector<std::string> toks;
      std::string t;
      while (ls >> t) toks.push_back(t);
      if (!toks.empty()) lines.push_back(std::move(toks));
    }
  }

  enum class Section { None, Objective, Constraints, Bounds, Binaries, Done };
  Section sec = Section::None;

  auto find_var = [&](const std::string& name) {
    int v = mdl.find_var(name);
    if (v < 0) throw std::runtime_error("lp read: unknown variable '" + name + "'");
    return v;
  };

  // terms look like: [sign] coeff name | [sign] coeff; returns offset sum
  auto parse_terms = [&](const std::vector<std::string>& toks, std::size_t from, std::size_t to,
                         std::vector<LinearTerm>& dst) {
    double offset = 0;
    double sign = 1;
    std::size_t i = from;
    while (i < to) {
      if (toks[i] == "+") {
        sign = 1;
        ++i;
        continue;
      }
      if (toks[i] == "-") {
        sign = -1;
        ++i;
        continue;
      }
      if (!detail::lp_number_token(toks[i]))
        throw std::runtime_error("lp read: expected coefficient, got '" + toks[i] + "'");
      double c = sign * detail::lp_to_double(toks[i]);
      ++i;
      if (i < to && !detail::lp_number_token(toks[i]) && toks[i] != "+" && toks[i] != "-") {
        dst.push_back({find_var(toks[i]), c});
        ++i;
      } else {
        offset += c;
      }
      sign = 1;
    }
    return offset;
  };

  std::vector<std::string> pending_obj;
  for (const std::vector<std::string>& toks : lines) {
    const std::string& head = toks[0];
    if (head == "Maximize") {
      sec = Section::Objective;
      continue;
    }
    if (head == "Subject" && toks.size() > 1 && toks[1] == "To") {
      sec = Section::Constraints;
      continue;
    }
    if (head == "Bounds") {
      sec = Section::Bounds;
      continue;
    }
    if (head == "Binaries") {
      sec = Section::Binaries;
      continue;
    }
    if (head == "End") {
      sec = Section::Done;
      continue;
    }

    switch (sec) {
      case Section::Objective:
        // collect; resolved after Bounds built the variable list
        for (const std::string& t : toks) pending_obj.push_back(t);
        break;
      case Section::Constraints: {
        // `name:` then either terms rel rhs, or the quadratic form
        if (head.empty() || head.back() != ':')
          throw std::runtime_error("lp read: constraint without label");
        std::vector<std::string> body(toks.begin() + 1, toks.end());
        // stash raw; resolve later like the objective
        body.insert(body.begin(), head);
        pending_obj.push_back("\x01");  // separator marker: constraint start
        for (const std::string& t : body) pending_obj.push_back(t);
        break;
      }
      case Section::Bounds: {
        ModelVariable v;
        v.kind = VarKind::Continuous;
        double inf = std::numeric_limits<double>::infinity();
        if (toks.size() == 2 && toks[1] == "free") {
          v.name = toks[0];
          v.lb = -inf;
          v.ub = inf;
        } else if (toks.size() == 3 && toks[1] == "<=") {
          v.lb = detail::lp_to_double(toks[0]);
          v.name = toks[2];
          v.ub = inf;
        } else if (toks.size() == 5 && toks[1] == "<=" && toks[3] == "<=") {
          v.lb = detail::lp_to_double(toks[0]);
          v.name = toks[2];
          v.ub = detail::lp_to_double(toks[4]);
        } else {
          throw std::runtime_error("lp read: malformed bounds line");
        }
        detail::infer_role(v);
        mdl.vars.push_back(std::move(v));
        break;
      }
      case Section::Binaries:
        for (const std::string& t : toks) {
          int v = find_var(t);
          mdl.vars[v].kind = VarKind::Binary;
        }
        break;
      default:
        throw std::runtime_error("lp read: content outside any section");
    }
  }
  if (sec != Section::Done) throw std::runtime_error("lp read: missing End marker");

  // second pass over the stashed objective/constraint token stream
  {
    std::vector<std::string>& toks = pending_obj;
    std::size_t i = 0;
    // objective: `obj:` terms...
    if (i < toks.size() && toks[i] == "obj:") {
      ++i;
      std::size_t end = i;
      while (end < toks.size() && toks[end] != "\x01") ++end;
      mdl.objective_offset = parse_terms(toks, i, end, mdl.objective);
      i = end;
    }
    while (i < toks.size()) {
      if (toks[i] != "\x01") throw std::runtime_error("lp read: stray tokens");
      ++i;
      std::string label = toks[i];
      label.pop_back();  // trailing ':'
      ++i;
      if (i < toks.size() && toks[i] == "[") {
        // quadratic: [ r * w ] >= rhs
        HyperbolicRow h;
        h.name = label;
        h.r_var = find_var(toks[i + 1]);
        if (toks[i + 2] != "*" || toks[i + 4] != "]" || toks[i + 5] != ">=")
          throw std::runtime_error("lp read: malformed quadratic row " + label);
        h.w_var = find_var(toks[i + 3]);
        h.rhs = detail::lp_to_double(toks[i + 6]);
        h.zone = mdl.vars[h.r_var].a;
        conic.hyperbolic.push_back(std::move(h));
        i += 7;
        continue;
      }
      std::size_t end = i;
      while (end < toks.size() && toks[end] != "\x01") ++end;
      if (end - i < 2) throw std::runtime_error("lp read: truncated constraint " + label);
      LinearConstraint c;
      c.name = label;
      const std::string& rel = toks[end - 2];
      if (rel == "<=")
        c.rel = Relation::LessEq;
      else if (rel == ">=")
        c.rel = Relation::GreaterEq;
      else if (rel == "=")
        c.rel = Relation::Equal;
      else
        throw std::runtime_error("lp read: bad relation '" + rel + "' in " + label);
      c.rhs = detail::lp_to_double(toks[end - 1]);
      double off = parse_terms(toks, i, end - 2, c.terms);
      if (off != 0) throw std::runtime_error("lp read: constant on constraint lhs in " + label);
      mdl.cons.push_back(std::move(c));
      i = end;
    }
  }

  mdl.validate();
  return conic;
}

}  // namespace mcpr
