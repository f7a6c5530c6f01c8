#include "skewspec/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <unistd.h>

#include "skewspec/error.hpp"

namespace skewspec {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Source positions for JSON pointers. nlohmann keeps no value positions, so
// semantic errors re-scan the text for the offending value.

class PointerLocator {
 public:
  explicit PointerLocator(std::string_view s) : s_(s) {}

  std::optional<std::size_t> find(const std::vector<std::string>& tokens) {
    pos_ = 0;
    if (!descend(tokens, 0)) return std::nullopt;
    return pos_;
  }

 private:
  void ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' || s_[pos_] == '\r')) ++pos_;
  }

  std::string read_string() {
    std::string out;
    ++pos_;
    while (pos_ < s_.size()) {
      const char c = s_[pos_++];
      if (c == '"') break;
      if (c == '\\' && pos_ < s_.size()) {
        out.push_back(s_[pos_++]);
        continue;
      }
      out.push_back(c);
    }
    return out;
  }

  void skip_value() {
    ws();
    if (pos_ >= s_.size()) return;
    const char c = s_[pos_];
    if (c == '"') {
      read_string();
    } else if (c == '{' || c == '[') {
      const char close = c == '{' ? '}' : ']';
      ++pos_;
      ws();
      if (pos_ < s_.size() && s_[pos_] == close) {
        ++pos_;
        return;
      }
      while (pos_ < s_.size()) {
        if (c == '{') {
          ws();
          read_string();
          ws();
          ++pos_;  // ':'
        }
        skip_value();
        ws();
        if (pos_ < s_.size() && s_[pos_] == ',') {
          ++pos_;
          continue;
        }
        ++pos_;
        return;
      }
    } else {
      while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != '}' && s_[pos_] != ']' && s_[pos_] != ' ' &&
             s_[pos_] != '\n' && s_[pos_] != '\r' && s_[pos_] != '\t')
        ++pos_;
    }
  }

  bool descend(const std::vector<std::string>& tokens, std::size_t depth) {
    ws();
    if (depth == tokens.size()) return true;
    if (pos_ >= s_.size()) return false;
    if (s_[pos_] == '{') {
      ++pos_;
      while (true) {
        ws();
        if (pos_ >= s_.size() || s_[pos_] != '"') return false;
        const std::string key = read_string();
        ws();
        if (pos_ >= s_.size() || s_[pos_] != ':') return false;
        ++pos_;
        if (key == tokens[depth]) return descend(tokens, depth + 1);
        skip_value();
        ws();
        if (pos_ < s_.size() && s_[pos_] == ',') {
          ++pos_;
          continue;
        }
        return false;
      }
    }
    if (s_[pos_] == '[') {
      std::size_t target = 0;
      try {
        target = std::stoul(tokens[depth]);
      } catch (...) {
        return false;
      }
      ++pos_;
      for (std::size_t i = 0;; ++i) {
        ws();
        if (pos_ >= s_.size() || s_[pos_] == ']') return false;
        if (i == target) return descend(tokens, depth + 1);
        skip_value();
        ws();
        if (pos_ < s_.size() && s_[pos_] == ',') {
          ++pos_;
          continue;
        }
        return false;
      }
    }
    return false;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

std::vector<std::string> pointer_tokens(const json::json_pointer& p) {
  std::vector<std::string> out;
  const std::string s = p.to_string();
  std::size_t i = 0;
  while (i < s.size()) {
    const std::size_t next = s.find('/', i + 1);
    std::string tok = s.substr(i + 1, next == std::string::npos ? std::string::npos : next - i - 1);
    for (std::size_t k = 0; (k = tok.find('~', k)) != std::string::npos; ++k)
      tok.replace(k, 2, tok.compare(k, 2, "~1") == 0 ? "/" : "~");
    out.push_back(std::move(tok));
    if (next == std::string::npos) break;
    i = next;
  }
  return out;
}

std::size_t line_of(std::string_view text, const json::json_pointer& p) {
  PointerLocator loc(text);
  std::vector<std::string> tokens = pointer_tokens(p);
  while (true) {
    if (auto pos = loc.find(tokens))
      return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(*pos), '\n'));
    if (tokens.empty()) return 1;
    tokens.pop_back();
  }
}

// ---------------------------------------------------------------------------
// Typed access with pointer-tagged errors.

class Node {
 public:
  Node(const json& v, json::json_pointer p, std::string_view text) : v_(&v), p_(std::move(p)), text_(text) {}

  const json& value() const { return *v_; }
  const json::json_pointer& pointer() const { return p_; }

  [[noreturn]] void fail(const std::string& msg) const {
    const std::string where = p_.empty() ? "/" : p_.to_string();
    throw Error(ErrorCode::ConfigError, "line " + std::to_string(line_of(text_, p_)) + ": " + where + ": " + msg);
  }

  bool has(const char* key) const { return v_->is_object() && v_->contains(key); }

  Node operator[](const char* key) const {
    if (!v_->is_object()) fail("expected an object");
    auto it = v_->find(key);
    if (it == v_->end()) fail(std::string("missing required key \"") + key + "\"");
    return Node(*it, p_ / key, text_);
  }

  Node operator[](std::size_t i) const { return Node((*v_)[i], p_ / i, text_); }
  Node operator[](int i) const { return (*this)[static_cast<std::size_t>(i)]; }

  const json& object() const {
    if (!v_->is_object()) fail("expected an object");
    return *v_;
  }

  std::size_t array_size() const {
    if (!v_->is_array()) fail("expected an array");
    return v_->size();
  }

  void only_keys(std::initializer_list<const char*> allowed) const {
    for (auto it = object().begin(); it != object().end(); ++it) {
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return it.key() == a; }))
        Node(it.value(), p_ / it.key(), text_).fail("unknown key \"" + it.key() + "\"");
    }
  }

  long integer() const {
    if (!v_->is_number_integer()) fail("expected an integer");
    return v_->get<long>();
  }

  int small_int() const {
    const long v = integer();
    if (v < -1000000 || v > 1000000) fail("integer out of range");
    return static_cast<int>(v);
  }

  std::size_t count(std::size_t lo = 0) const {
    const long v = integer();
    if (v < static_cast<long>(lo)) fail("expected an integer >= " + std::to_string(lo));
    return static_cast<std::size_t>(v);
  }

  double number() const {
    if (!v_->is_number()) fail("expected a number");
    const double v = v_->get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  bool boolean() const {
    if (!v_->is_boolean()) fail("expected true or false");
    return v_->get<bool>();
  }

  std::string string() const {
    if (!v_->is_string()) fail("expected a string");
    return v_->get<std::string>();
  }

  std::vector<int> int_vector(std::size_t expected) const {
    if (array_size() != expected) fail("expected " + std::to_string(expected) + " entries, got " + std::to_string(v_->size()));
    std::vector<int> out;
    for (std::size_t i = 0; i < expected; ++i) out.push_back((*this)[i].small_int());
    return out;
  }

  Complex complex() const {
    if (v_->is_number()) return number();
    if (array_size() != 2) fail("expected a complex number [re, im]");
    return {(*this)[0].number(), (*this)[1].number()};
  }

 private:
  const json* v_;
  json::json_pointer p_;
  std::string_view text_;
};

// Term list: [{"k": [..], "c": [re, im] | re}, {"cos": [..], "amp": a, "phase": p}, ...].
TrigPoly parse_trig(const Node& n, std::size_t d) {
  TrigPoly out(d);
  const std::size_t count = n.array_size();
  for (std::size_t i = 0; i < count; ++i) {
    const Node term = n[i];
    if (term.has("cos")) {
      term.only_keys({"cos", "amp", "phase"});
      const Frequency k = term["cos"].int_vector(d);
      const double amp = term["amp"].number();
      const double phase = term.has("phase") ? term["phase"].number() : 0.0;
      out += TrigPoly::cosine(k, amp, phase);
    } else {
      term.only_keys({"k", "c"});
      out.add_term(term["k"].int_vector(d), term["c"].complex());
    }
  }
  return out;
}

json trig_to_json(const TrigPoly& p) {
  json arr = json::array();
  for (const auto& [k, c] : p.terms()) arr.push_back({{"k", k}, {"c", {c.real(), c.imag()}}});
  return arr;
}

CMatrix parse_h(const Node& n) {
  if (n.array_size() != 2) n.fail("expected a 2x2 matrix");
  CMatrix h(2);
  for (std::size_t r = 0; r < 2; ++r) {
    const Node row = n[r];
    if (row.array_size() != 2) row.fail("expected a row of 2 complex entries");
    for (std::size_t c = 0; c < 2; ++c) h(r, c) = row[c].complex();
  }
  return h;
}

json h_to_json(const CMatrix& h) {
  json rows = json::array();
  for (std::size_t r = 0; r < 2; ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < 2; ++c) row.push_back({h(r, c).real(), h(r, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

json cocycle_to_json(const Cocycle& c) {
  return std::visit(
      [](const auto& f) -> json {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, AbelianAffine>) {
          json eta = json::array();
          for (const auto& e : f.eta) eta.push_back(trig_to_json(e));
          return {{"family", "abelian_affine"}, {"B", f.B}, {"eta", eta}};
        } else if constexpr (std::is_same_v<F, Su2Diag>) {
          return {{"family", "su2_diag"}, {"b", f.b}, {"eta", trig_to_json(f.eta)}, {"h", h_to_json(f.h)}};
        } else {
          return {{"family", "u2_diag"},           {"b1", f.b1}, {"b2", f.b2}, {"eta1", trig_to_json(f.eta1)},
                  {"eta2", trig_to_json(f.eta2)}, {"h", h_to_json(f.h)}};
        }
      },
      c.family());
}

template <class F>
auto guarded(const Node& n, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    n.fail(e.what());
  }
}

Cocycle parse_cocycle(const Node& n, std::size_t d, GroupTag tag, std::size_t group_dim) {
  const std::string family = n["family"].string();
  const auto check_family = [&](GroupTag expected) {
    if (tag != expected)
      n["family"].fail("family \"" + family + "\" needs group \"" + to_string(expected) + "\", config declares \"" +
                       to_string(tag) + "\"");
  };
  if (family == "abelian_affine") {
    check_family(GroupTag::Torus);
    n.only_keys({"family", "B", "eta"});
    AbelianAffine f;
    const Node B = n["B"];
    if (B.array_size() != group_dim) B.fail("expected " + std::to_string(group_dim) + " rows (group dim)");
    for (std::size_t r = 0; r < group_dim; ++r) f.B.push_back(B[r].int_vector(d));
    if (n.has("eta")) {
      const Node eta = n["eta"];
      if (eta.array_size() != group_dim) eta.fail("expected " + std::to_string(group_dim) + " term lists");
      for (std::size_t r = 0; r < group_dim; ++r) f.eta.push_back(parse_trig(eta[r], d));
    } else {
      f.eta.assign(group_dim, TrigPoly(d));
    }
    return guarded(n, [&] { return Cocycle(f); });
  }
  if (family == "su2_diag") {
    check_family(GroupTag::Su2);
    n.only_keys({"family", "b", "eta", "h"});
    Su2Diag f;
    f.b = n["b"].int_vector(d);
    f.eta = n.has("eta") ? parse_trig(n["eta"], d) : TrigPoly(d);
    if (n.has("h")) f.h = parse_h(n["h"]);
    return guarded(n, [&] { return Cocycle(f); });
  }
  if (family == "u2_diag") {
    check_family(GroupTag::U2);
    n.only_keys({"family", "b1", "b2", "eta1", "eta2", "h"});
    U2Diag f;
    f.b1 = n["b1"].int_vector(d);
    f.b2 = n["b2"].int_vector(d);
    f.eta1 = n.has("eta1") ? parse_trig(n["eta1"], d) : TrigPoly(d);
    f.eta2 = n.has("eta2") ? parse_trig(n["eta2"], d) : TrigPoly(d);
    if (n.has("h")) f.h = parse_h(n["h"]);
    return guarded(n, [&] { return Cocycle(f); });
  }
  n["family"].fail("unknown cocycle family \"" + family + "\" (abelian_affine, su2_diag, u2_diag)");
}

BlockConfig parse_block(const Node& n, GroupTag tag, std::size_t group_dim) {
  std::optional<Irrep> pi;
  if (n.has("q")) {
    n.only_keys({"q", "j"});
    if (tag != GroupTag::Torus) n["q"].fail("character index q requires group \"torus\"");
    pi = Irrep(AbelianChar{n["q"].int_vector(group_dim)});
  } else if (n.has("m")) {
    n.only_keys({"m", "n", "j"});
    if (tag != GroupTag::U2) n["m"].fail("index (m, n) requires group \"u2\"");
    const int nn = n["n"].small_int();
    if (nn < 0 || nn > kMaxSu2Index) n["n"].fail("n must lie in 0.." + std::to_string(kMaxSu2Index));
    pi = Irrep(U2Irrep{n["m"].small_int(), nn});
  } else if (n.has("n")) {
    n.only_keys({"n", "j"});
    if (tag != GroupTag::Su2) n["n"].fail(tag == GroupTag::U2 ? "u2 blocks need both m and n" : "index n requires group \"su2\"");
    const int nn = n["n"].small_int();
    if (nn < 0 || nn > kMaxSu2Index) n["n"].fail("n must lie in 0.." + std::to_string(kMaxSu2Index));
    pi = Irrep(Su2Irrep{nn});
  } else {
    n.fail("block needs one of q, n or (m, n)");
  }
  BlockConfig b{*pi, 0};
  if (n.has("j")) {
    b.j = n["j"].count();
    if (b.j >= pi->dim()) n["j"].fail("row index j must be < " + std::to_string(pi->dim()));
  }
  return b;
}

std::pair<int, int> parse_range(const Node& n) {
  if (n.array_size() != 2) n.fail("expected [lo, hi]");
  const int lo = n[0].small_int();
  const int hi = n[1].small_int();
  if (lo > hi) n.fail("range is empty");
  return {lo, hi};
}

Frame parse_frame(const Node& n) {
  const std::string s = n.string();
  if (s == "diagonal") return Frame::Diagonal;
  if (s == "raw") return Frame::Raw;
  n.fail("frame must be \"diagonal\" or \"raw\"");
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json point_json(const TorusPoint& x) { return json(std::vector<double>(x.coords().begin(), x.coords().end())); }

json matrix_json(const CMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.size(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.size(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

json irrep_json(const Irrep& pi) {
  return std::visit(
      [](const auto& k) -> json {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, AbelianChar>) return {{"kind", "torus"}, {"q", k.q}};
        else if constexpr (std::is_same_v<K, Su2Irrep>) return {{"kind", "su2"}, {"n", k.n}};
        else return {{"kind", "u2"}, {"m", k.m}, {"n", k.n}};
      },
      pi.kind());
}

std::string file_stem(const std::string& label) {
  std::string out;
  for (char c : label) out.push_back((c == '=' || c == ',' || c == '/') ? '_' : c);
  return out;
}

// Runs f(i) for i < count on a bounded pool; results land in index order.
template <class R, class F>
std::vector<R> parallel_map(std::size_t count, F&& f) {
  std::vector<std::optional<R>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(count, std::thread::hardware_concurrency()));
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        slots[i].emplace(f(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  std::vector<R> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

}  // namespace

std::optional<double> surrogate_value(std::string_view name) {
  if (name == "sqrt2m1") return std::sqrt(2.0) - 1.0;
  if (name == "sqrt3m1") return std::sqrt(3.0) - 1.0;
  return std::nullopt;
}

std::string BlockConfig::label() const { return pi.label() + "/j=" + std::to_string(j); }

// ---------------------------------------------------------------------------

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // Byte offset to line:column.
    const std::size_t off = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const std::size_t line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(off), '\n'));
    const std::size_t nl = text.rfind('\n', off == 0 ? 0 : off - 1);
    const std::size_t col = nl == std::string_view::npos ? off + 1 : off - nl;
    throw Error(ErrorCode::ConfigError,
                "line " + std::to_string(line) + ", column " + std::to_string(col) + ": malformed JSON");
  }
  const Node root(doc, json::json_pointer(), text);
  root.only_keys({"name", "base", "group", "cocycle", "blocks", "block_ranges", "analysis"});

  const Node base = root["base"];
  base.only_keys({"d", "y", "ergodic_declared"});
  const std::size_t d = base["d"].count(1);
  const Node yn = base["y"];
  if (yn.array_size() != d) yn.fail("expected " + std::to_string(d) + " entries (base dim d)");
  std::vector<double> y;
  for (std::size_t i = 0; i < d; ++i) {
    const Node e = yn[i];
    if (e.value().is_string()) {
      const auto v = surrogate_value(e.string());
      if (!v) e.fail("unknown surrogate \"" + e.string() + "\" (sqrt2m1, sqrt3m1)");
      y.push_back(*v);
    } else {
      y.push_back(e.number());
    }
  }
  const bool ergodic = base.has("ergodic_declared") ? base["ergodic_declared"].boolean() : false;

  const Node group = root["group"];
  const std::string kind = group["kind"].string();
  GroupTag tag;
  std::size_t group_dim = 1;
  if (kind == "torus") {
    group.only_keys({"kind", "dim"});
    tag = GroupTag::Torus;
    group_dim = group.has("dim") ? group["dim"].count(1) : 1;
  } else if (kind == "su2" || kind == "u2") {
    group.only_keys({"kind"});
    tag = kind == "su2" ? GroupTag::Su2 : GroupTag::U2;
  } else {
    group["kind"].fail("group kind must be \"torus\", \"su2\" or \"u2\"");
  }

  Cocycle cocycle = parse_cocycle(root["cocycle"], d, tag, group_dim);
  ExperimentConfig cfg(TranslationFlow(y, ergodic), std::move(cocycle));
  cfg.y_sources_ = yn.value();
  cfg.group_dim_ = group_dim;
  if (root.has("name")) cfg.name_ = root["name"].string();

  if (root.has("blocks")) {
    const Node blocks = root["blocks"];
    for (std::size_t i = 0; i < blocks.array_size(); ++i) cfg.explicit_blocks_.push_back(parse_block(blocks[i], tag, group_dim));
  }
  cfg.blocks_ = cfg.explicit_blocks_;
  if (root.has("block_ranges")) {
    const Node r = root["block_ranges"];
    if (tag != GroupTag::U2) r.fail("block_ranges is only defined for group \"u2\"");
    r.only_keys({"m", "n", "j"});
    U2Ranges u;
    std::tie(u.m_lo, u.m_hi) = parse_range(r["m"]);
    std::tie(u.n_lo, u.n_hi) = parse_range(r["n"]);
    if (u.n_lo < 0 || u.n_hi > kMaxSu2Index) r["n"].fail("n must lie in 0.." + std::to_string(kMaxSu2Index));
    if (r.has("j")) {
      u.j = r["j"].count();
      if (u.j > static_cast<std::size_t>(u.n_lo)) r["j"].fail("row index j must be <= the smallest n");
    }
    for (int m = u.m_lo; m <= u.m_hi; ++m)
      for (int n = u.n_lo; n <= u.n_hi; ++n) cfg.blocks_.push_back({Irrep(U2Irrep{m, n}), u.j});
    cfg.u2_ranges_ = u;
  }
  if (cfg.blocks_.empty()) root.fail("no blocks requested (give \"blocks\" or \"block_ranges\")");

  if (root.has("analysis")) {
    const Node a = root["analysis"];
    a.only_keys({"grid", "N_max", "pos_tol", "n_max", "seed", "frame", "quadrature", "reference_point", "dini_samples"});
    AnalysisConfig& an = cfg.analysis_;
    if (a.has("grid")) {
      const Node g = a["grid"];
      if (g.value().is_array()) {
        if (g.array_size() != d) g.fail("expected " + std::to_string(d) + " grid sizes");
        for (std::size_t i = 0; i < d; ++i) an.grid.push_back(g[i].count(1));
      } else {
        an.grid.assign(d, g.count(1));
      }
    }
    if (a.has("N_max")) an.N_max = a["N_max"].count(1);
    if (a.has("pos_tol")) {
      an.pos_tol = a["pos_tol"].number();
      if (an.pos_tol < 0.0) a["pos_tol"].fail("pos_tol must be >= 0");
    }
    if (a.has("n_max")) an.n_max = a["n_max"].count();
    if (a.has("seed")) an.seed = static_cast<std::uint64_t>(a["seed"].count());
    if (a.has("frame")) an.frame = parse_frame(a["frame"]);
    if (a.has("quadrature")) an.quadrature = a["quadrature"].count(1);
    if (a.has("reference_point")) {
      const Node rp = a["reference_point"];
      if (rp.array_size() != d) rp.fail("expected " + std::to_string(d) + " coordinates");
      std::vector<double> x;
      for (std::size_t i = 0; i < d; ++i) x.push_back(rp[i].number());
      an.reference_point = x;
    }
    if (a.has("dini_samples")) an.dini_samples = a["dini_samples"].count(1);
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

json ExperimentConfig::to_json() const {
  json j;
  if (!name_.empty()) j["name"] = name_;
  j["base"] = {{"d", flow_.dim()}, {"y", y_sources_}, {"ergodic_declared", flow_.ergodic_declared()}};
  if (group() == GroupTag::Torus) j["group"] = {{"kind", "torus"}, {"dim", group_dim_}};
  else j["group"] = {{"kind", to_string(group())}};
  j["cocycle"] = cocycle_to_json(cocycle_);
  if (!explicit_blocks_.empty()) {
    json blocks = json::array();
    for (const auto& b : explicit_blocks_) {
      json e = irrep_json(b.pi);
      e.erase("kind");
      e["j"] = b.j;
      blocks.push_back(e);
    }
    j["blocks"] = blocks;
  }
  if (u2_ranges_) {
    j["block_ranges"] = {{"m", {u2_ranges_->m_lo, u2_ranges_->m_hi}},
                         {"n", {u2_ranges_->n_lo, u2_ranges_->n_hi}},
                         {"j", u2_ranges_->j}};
  }
  json a = {{"N_max", analysis_.N_max},
            {"pos_tol", analysis_.pos_tol},
            {"n_max", analysis_.n_max},
            {"seed", analysis_.seed},
            {"frame", to_string(analysis_.frame)},
            {"dini_samples", analysis_.dini_samples}};
  if (!analysis_.grid.empty()) a["grid"] = analysis_.grid;
  if (analysis_.quadrature) a["quadrature"] = *analysis_.quadrature;
  if (analysis_.reference_point) a["reference_point"] = *analysis_.reference_point;
  j["analysis"] = a;
  return j;
}

std::string ExperimentConfig::serialize() const { return to_json().dump(2) + "\n"; }

std::string ExperimentConfig::hash() const { return hex64(fnv1a(serialize())); }

TorusGrid ExperimentConfig::analysis_grid() const {
  if (!analysis_.grid.empty()) return TorusGrid(analysis_.grid);
  const std::size_t d = flow_.dim();
  return TorusGrid::uniform(d, d == 1 ? 512 : d == 2 ? 64 : 16);
}

TorusPoint ExperimentConfig::reference_point() const {
  if (analysis_.reference_point) return TorusPoint(*analysis_.reference_point);
  Rng rng(analysis_.seed);
  std::vector<double> x(flow_.dim());
  for (double& v : x) v = rng.uniform();
  return TorusPoint(x);
}

std::vector<std::size_t> select_blocks(const ExperimentConfig& cfg, std::string_view selector) {
  const auto& blocks = cfg.blocks();
  std::vector<std::size_t> out;
  if (selector.empty() || selector == "all") {
    for (std::size_t i = 0; i < blocks.size(); ++i) out.push_back(i);
    return out;
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].label() == selector || blocks[i].pi.label() == selector) out.push_back(i);
  }
  if (out.empty() && std::all_of(selector.begin(), selector.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    const std::size_t idx = std::stoul(std::string(selector));
    if (idx < blocks.size()) out.push_back(idx);
  }
  if (out.empty()) {
    std::string known;
    for (const auto& b : blocks) known += (known.empty() ? "" : ", ") + b.label();
    throw Error(ErrorCode::NotFound, "unknown block \"" + std::string(selector) + "\" (known: " + known + ")");
  }
  return out;
}

json to_json(const MourreReport& r) {
  json table = json::array();
  for (const auto& row : r.table) table.push_back({{"N", row.N}, {"lambda", row.value}, {"argmin", point_json(row.argmin)}});
  json j = {{"irrep", irrep_json(r.pi)},
            {"label", r.pi.label()},
            {"dim", r.pi.dim()},
            {"frame", to_string(r.frame)},
            {"grid", r.grid},
            {"pos_tol", r.pos_tol},
            {"weights", r.weights ? json(r.weights->a) : json(nullptr)},
            {"commutation_residual", r.commutation_residual},
            {"hermiticity_residual", r.hermiticity_residual},
            {"degree_residual", r.degree_residual},
            {"lambda_table", table},
            {"verdict", to_string(r.verdict)},
            {"verdict_N", r.verdict_N ? json(*r.verdict_N) : json(nullptr)},
            {"lebesgue", r.lebesgue},
            {"notes", r.notes}};
  return j;
}

json analyze_report(const ExperimentConfig& cfg) {
  const TorusGrid grid = cfg.analysis_grid();
  const AnalysisConfig& an = cfg.analysis();
  const auto& blocks = cfg.blocks();

  std::vector<json> per_block = parallel_map<json>(blocks.size(), [&](std::size_t i) {
    const BlockConfig& b = blocks[i];
    VerdictOptions opts;
    opts.N_max = an.N_max;
    opts.pos_tol = an.pos_tol;
    opts.frame = an.frame;
    const MourreReport rep = verdict(cfg.cocycle(), b.pi, cfg.flow(), grid, opts);
    json j = to_json(rep);
    j["block"] = b.label();
    j["j"] = b.j;
    json samples = json::array();
    for (const auto& s : dini_diagnostic(cfg.cocycle(), b.pi, cfg.flow(), log_spaced_times(an.dini_samples, 1e-6),
                                         grid, an.frame))
      samples.push_back({{"t", s.t}, {"value", s.value}});
    j["dini_heuristic"] = {{"rigorous", false}, {"samples", samples}};
    return j;
  });

  std::vector<double> y(cfg.flow().velocity().begin(), cfg.flow().velocity().end());
  json report = {{"schema_version", kReportSchemaVersion},
                 {"tool", {{"name", kToolName}, {"version", kToolVersion}}},
                 {"config_hash", cfg.hash()},
                 {"config", cfg.to_json()},
                 {"base",
                  {{"d", cfg.flow().dim()},
                   {"y", y},
                   {"y_sources", cfg.y_sources()},
                   {"ergodic_declared", cfg.flow().ergodic_declared()}}},
                 {"group", to_string(cfg.group())},
                 {"blocks", per_block}};

  if (cfg.u2_ranges()) {
    const auto& u = *cfg.u2_ranges();
    const auto& f = std::get<U2Diag>(cfg.cocycle().family());
    json members = json::array();
    for (const auto& e : u2_admissible_set(f.b1, f.b2, cfg.flow().velocity(), u.m_lo, u.m_hi, u.n_lo, u.n_hi))
      members.push_back({{"m", e.m}, {"n", e.n}, {"infimum", e.infimum}});
    report["u2_admissible_set"] = {{"m_range", {u.m_lo, u.m_hi}}, {"n_range", {u.n_lo, u.n_hi}}, {"members", members}};
  }
  return report;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  const std::filesystem::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::Io, "cannot rename into " + path.string());
  }
}

namespace {

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create directory " + dir.string() + ": " + ec.message());
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

AnalyzeOutcome run_analyze(const ExperimentConfig& cfg, const std::optional<std::filesystem::path>& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  AnalyzeOutcome out;
  out.report = analyze_report(cfg);
  const std::string text = out.report.dump(2) + "\n";
  const double elapsed = seconds_since(t0);

  json digests = json::array();
  for (const auto& b : out.report["blocks"]) {
    const auto& table = b["lambda_table"];
    digests.push_back({{"block", b["block"]},
                       {"verdict", b["verdict"]},
                       {"verdict_N", b["verdict_N"]},
                       {"lebesgue", b["lebesgue"]},
                       {"lambda_star", table.empty() ? json(nullptr) : table.back()["lambda"]}});
  }
  out.summary = {{"schema_version", kReportSchemaVersion},
                 {"tool", {{"name", kToolName}, {"version", kToolVersion}}},
                 {"config_hash", cfg.hash()},
                 {"report_digest", hex64(fnv1a(text))},
                 {"blocks", digests},
                 {"correlation_csv", json::array()},
                 {"timings", {{"analyze_seconds", elapsed}}}};
  if (out_dir) {
    ensure_dir(*out_dir);
    const auto report_path = *out_dir / "report.json";
    write_file_atomic(report_path, text);
    out.summary["report_path"] = report_path.string();
    write_file_atomic(*out_dir / "summary.json", out.summary.dump(2) + "\n");
  }
  return out;
}

json run_correlations(const ExperimentConfig& cfg, std::string_view selector, const std::filesystem::path& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto indices = select_blocks(cfg, selector);
  ensure_dir(out_dir);
  const AnalysisConfig& an = cfg.analysis();
  const std::string cocycle_hash = hex64(fnv1a(cocycle_to_json(cfg.cocycle()).dump()));

  std::vector<json> entries = parallel_map<json>(indices.size(), [&](std::size_t i) {
    const BlockConfig& b = cfg.blocks()[indices[i]];
    const ObservableBlock psi = ObservableBlock::first_mode(cfg.cocycle(), cfg.flow(), b.pi, b.j, an.frame);
    const QuadratureSpec quad = an.quadrature ? QuadratureSpec{std::vector<std::size_t>(cfg.flow().dim(), *an.quadrature)}
                                              : default_quadrature(psi, an.n_max);
    const CorrelationSeries series = correlation_sequence(psi, an.n_max, quad);
    const std::string stem = "corr_" + file_stem(b.label());
    const auto csv_path = out_dir / (stem + ".csv");
    const auto meta_path = out_dir / (stem + ".json");
    write_file_atomic(csv_path, to_csv(series));
    json meta = {{"schema_version", kReportSchemaVersion},
                 {"block", b.label()},
                 {"observable", "first_mode"},
                 {"grid", series.quad.sizes},
                 {"n_max", series.n_max},
                 {"norm_squared", psi.norm_squared()},
                 {"wiener_average", wiener_average(series)},
                 {"cocycle_hash", cocycle_hash},
                 {"config_hash", cfg.hash()},
                 {"frame", to_string(an.frame)},
                 {"warnings", series.warnings}};
    write_file_atomic(meta_path, meta.dump(2) + "\n");
    const Complex c0 = series.at(0);
    return json{{"block", b.label()},
                {"csv", csv_path.string()},
                {"meta", meta_path.string()},
                {"c0", {c0.real(), c0.imag()}},
                {"wiener_average", wiener_average(series)},
                {"warnings", series.warnings}};
  });
  return {{"schema_version", kReportSchemaVersion},
          {"config_hash", cfg.hash()},
          {"correlation_csv", entries},
          {"timings", {{"correlations_seconds", seconds_since(t0)}}}};
}

json degree_table(const ExperimentConfig& cfg, std::string_view selector, const std::vector<std::size_t>& Ns) {
  if (Ns.empty()) throw Error(ErrorCode::InvalidArgument, "degree: empty N list");
  for (std::size_t N : Ns)
    if (N == 0) throw Error(ErrorCode::InvalidArgument, "degree: N must be >= 1");
  const auto indices = select_blocks(cfg, selector);
  const TorusGrid grid = cfg.analysis_grid();
  const TorusPoint x0 = cfg.reference_point();
  const Frame frame = cfg.analysis().frame;
  std::vector<std::size_t> schedule(Ns);
  std::sort(schedule.begin(), schedule.end());
  schedule.erase(std::unique(schedule.begin(), schedule.end()), schedule.end());

  json blocks = json::array();
  for (std::size_t idx : indices) {
    const BlockConfig& b = cfg.blocks()[idx];
    const ConjugateWeights a = canonical_weights(cfg.cocycle(), b.pi, cfg.flow());
    const auto lam = lambda_star_schedule(cfg.cocycle(), b.pi, a, cfg.flow(), schedule, grid, frame);
    std::map<std::size_t, const LambdaStar*> by_N;
    for (const auto& l : lam) by_N[l.N] = &l;
    json rows = json::array();
    for (std::size_t N : Ns) {
      const CMatrix avg = matrix_M_N_average(cfg.cocycle(), b.pi, a, cfg.flow(), N, x0, frame);
      const CMatrix deg = matrix_M_N_degree(cfg.cocycle(), b.pi, a, cfg.flow(), N, x0, frame);
      const LambdaStar& l = *by_N.at(N);
      rows.push_back({{"N", N},
                      {"M_N_average", matrix_json(avg)},
                      {"M_N_degree", matrix_json(deg)},
                      {"residual", max_abs_diff(avg, deg)},
                      {"lambda_star", l.value},
                      {"argmin", point_json(l.argmin)}});
    }
    blocks.push_back({{"block", b.label()}, {"weights", a.a}, {"rows", rows}});
  }
  return {{"schema_version", kReportSchemaVersion},
          {"config_hash", cfg.hash()},
          {"reference_point", point_json(x0)},
          {"grid", std::vector<std::size_t>(grid.sizes().begin(), grid.sizes().end())},
          {"frame", to_string(frame)},
          {"blocks", blocks}};
}

// ---------------------------------------------------------------------------

RepcheckResult run_repcheck(const RepcheckOptions& opts) {
  if (opts.max_index < 0) throw Error(ErrorCode::InvalidArgument, "repcheck: max index must be >= 0");
  std::vector<Irrep> irreps;
  switch (opts.tag) {
    case GroupTag::Torus:
      for (int q = -opts.max_index; q <= opts.max_index; ++q) irreps.emplace_back(AbelianChar{{q}});
      break;
    case GroupTag::Su2:
      if (opts.max_index > kMaxSu2Index) throw Error(ErrorCode::InvalidArgument, "repcheck: n is limited to " + std::to_string(kMaxSu2Index));
      for (int n = 0; n <= opts.max_index; ++n) irreps.emplace_back(Su2Irrep{n});
      break;
    case GroupTag::U2: {
      if (opts.max_index > kMaxSu2Index) throw Error(ErrorCode::InvalidArgument, "repcheck: n is limited to " + std::to_string(kMaxSu2Index));
      const int mb = opts.m_bound.value_or(std::max(1, opts.max_index / 2));
      for (int m = -mb; m <= mb; ++m)
        for (int n = 0; n <= opts.max_index; ++n) irreps.emplace_back(U2Irrep{m, n});
      break;
    }
  }

  constexpr double kStructuralTol = 1e-10;
  const double pw_tol = opts.samples == 0 ? 0.0 : 3.0 / std::sqrt(static_cast<double>(opts.samples));
  Rng rng(opts.seed);
  std::vector<std::pair<GroupElement, GroupElement>> pairs;
  for (std::size_t i = 0; i < opts.pairs; ++i) {
    GroupElement g = haar_sample(opts.tag, 1, rng);
    GroupElement h = haar_sample(opts.tag, 1, rng);
    pairs.emplace_back(std::move(g), std::move(h));
  }
  std::vector<GroupElement> samples;
  samples.reserve(opts.samples);
  for (std::size_t i = 0; i < opts.samples; ++i) samples.push_back(haar_sample(opts.tag, 1, rng));

  RepcheckResult res;
  auto add = [&](std::string check, const Irrep& pi, double value, double tol, bool skipped = false) {
    RepcheckRow row{std::move(check), pi.label(), value, tol, skipped || value <= tol, skipped};
    res.all_pass = res.all_pass && row.pass;
    res.rows.push_back(std::move(row));
  };

  for (const Irrep& pi : irreps) {
    double unit = 0.0, hom = 0.0;
    for (const auto& [g, h] : pairs) {
      const CMatrix pg = represent(pi, g);
      const CMatrix ph = represent(pi, h);
      unit = std::max({unit, unitarity_residual(pg), unitarity_residual(ph)});
      hom = std::max(hom, max_abs_diff(represent(pi, group_multiply(g, h)), pg * ph));
    }
    add("unitarity", pi, unit, kStructuralTol);
    add("homomorphism", pi, hom, kStructuralTol);

    if (opts.samples == 0) {
      add("peter_weyl", pi, 0.0, 0.0, true);
      continue;
    }
    const std::size_t d = pi.dim();
    std::vector<Complex> gram(d * d * d, 0.0);
    for (const GroupElement& g : samples) {
      const CMatrix u = represent(pi, g);
      for (std::size_t j = 0; j < d; ++j)
        for (std::size_t m = 0; m < d; ++m)
          for (std::size_t k = 0; k < d; ++k) gram[(j * d + m) * d + k] += u(j, m) * std::conj(u(j, k));
    }
    double worst = 0.0;
    const double inv = 1.0 / static_cast<double>(opts.samples);
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t m = 0; m < d; ++m)
        for (std::size_t k = 0; k < d; ++k) {
          const double expected = m == k ? 1.0 / static_cast<double>(d) : 0.0;
          worst = std::max(worst, std::abs(gram[(j * d + m) * d + k] * inv - expected));
        }
    add("peter_weyl", pi, worst, pw_tol);
  }
  return res;
}

json to_json(const RepcheckResult& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"check", row.check},
                    {"irrep", row.irrep},
                    {"value", row.value},
                    {"tolerance", row.tolerance},
                    {"pass", row.pass},
                    {"skipped", row.skipped}});
  }
  return {{"all_pass", r.all_pass}, {"rows", rows}};
}

}  // namespace skewspec
