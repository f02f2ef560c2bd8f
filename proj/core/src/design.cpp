#include "imlg/design.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "text_util.hpp"

namespace imlg {

LineError::LineError(const std::string& what, std::size_t line)
    : std::runtime_error(line ? fmt::format("line {}: {}", line, what) : what), line_(line) {}

namespace {

constexpr std::string_view kTypeNames[kNumInstanceTypes] = {"LUT2", "LUT3", "LUT4",
                                                            "LUT5", "LUT6", "FF"};

}  // namespace

std::string_view to_string(InstanceType t) { return kTypeNames[static_cast<int>(t)]; }

std::optional<InstanceType> parse_instance_type(std::string_view s) {
  for (int i = 0; i < kNumInstanceTypes; ++i)
    if (kTypeNames[i] == s) return static_cast<InstanceType>(i);
  return std::nullopt;
}

bool is_legal_pin(InstanceType t, std::string_view pin) {
  if (!is_lut(t)) return pin == "d" || pin == "q" || pin == "ck" || pin == "sr";
  if (pin == "o") return true;
  if (pin.size() != 2 || pin[0] != 'i') return false;
  const int idx = pin[1] - '0';
  return idx >= 0 && idx < lut_inputs(t);
}

bool is_output_pin(InstanceType t, std::string_view pin) {
  return is_lut(t) ? pin == "o" : pin == "q";
}

std::map<std::string, std::size_t, std::less<>> PlacementDesign::instance_index() const {
  std::map<std::string, std::size_t, std::less<>> index;
  for (std::size_t i = 0; i < instances.size(); ++i) index.emplace(instances[i].name, i);
  return index;
}

namespace {

void validate_instance(const PlacementDesign& d, const Instance& inst, std::size_t line) {
  if (inst.name.empty()) throw DesignError("empty instance name", line);
  if (!(inst.x >= 0.0 && inst.x < d.layout_w && inst.y >= 0.0 && inst.y < d.layout_h))
    throw DesignError(fmt::format("coordinate out of extent for instance {}: ({}, {}) not in "
                                  "[0,{})x[0,{})",
                                  inst.name, inst.x, inst.y, d.layout_w, d.layout_h),
                      line);
}

struct NetChecker {
  explicit NetChecker(const PlacementDesign& d) : design(d), index(d.instance_index()) {}

  const PlacementDesign& design;
  std::map<std::string, std::size_t, std::less<>> index;
  std::set<std::pair<std::string, std::string>> used_pins;
  std::set<std::string, std::less<>> net_names;

  void check(const Net& net, std::size_t line) {
    if (net.name.empty()) throw DesignError("empty net name", line);
    if (!net_names.insert(net.name).second)
      throw DesignError(fmt::format("duplicate net name {}", net.name), line);
    if (net.pins.size() < 2)
      throw DesignError(fmt::format("net {} has {} pin(s); at least 2 required", net.name,
                                    net.pins.size()),
                        line);
    int outputs = 0;
    for (const auto& p : net.pins) {
      auto it = index.find(p.instance);
      if (it == index.end())
        throw DesignError(
            fmt::format("net {} references unknown instance {}", net.name, p.instance), line);
      const InstanceType t = design.instances[it->second].type;
      if (!is_legal_pin(t, p.pin))
        throw DesignError(fmt::format("pin illegal for type: {}.{} ({}) on net {}", p.instance,
                                      p.pin, to_string(t), net.name),
                          line);
      if (is_output_pin(t, p.pin)) ++outputs;
      if (!used_pins.emplace(p.instance, p.pin).second)
        throw DesignError(
            fmt::format("pin {}.{} connected more than once (net {})", p.instance, p.pin,
                        net.name),
            line);
    }
    if (outputs > 1)
      throw DesignError(fmt::format("net {} has {} output pins; at most one allowed", net.name,
                                    outputs),
                        line);
  }
};

}  // namespace

void validate(const PlacementDesign& d) {
  if (d.layout_w < 1 || d.layout_h < 1)
    throw DesignError(fmt::format("layout extent must be >= 1, got {} x {}", d.layout_w,
                                  d.layout_h));
  std::set<std::string_view> names;
  for (const auto& inst : d.instances) {
    validate_instance(d, inst, 0);
    if (!names.insert(inst.name).second)
      throw DesignError(fmt::format("duplicate instance name {}", inst.name));
  }
  NetChecker checker(d);
  for (const auto& net : d.nets) checker.check(net, 0);
}

PlacementDesign parse_design(std::string_view text) {
  PlacementDesign d;
  bool have_layout = false;
  std::set<std::string, std::less<>> names;
  // Nets are checked after all instances are known, so a NET may precede the
  // INSTANCE lines it references.
  std::vector<std::pair<Net, std::size_t>> pending_nets;

  std::size_t lineno = 0;
  for (std::string_view raw : detail::split_lines(text)) {
    ++lineno;
    const auto tok = detail::tokenize(detail::strip_comment(raw));
    if (tok.empty()) continue;
    const std::string_view kw = tok[0];
    if (kw == "LAYOUT") {
      if (tok.size() != 3) throw DesignError("LAYOUT expects 2 integers", lineno);
      if (have_layout) throw DesignError("duplicate LAYOUT line", lineno);
      d.layout_w = detail::parse_int(tok[1], lineno);
      d.layout_h = detail::parse_int(tok[2], lineno);
      if (d.layout_w < 1 || d.layout_h < 1)
        throw DesignError("layout extent must be >= 1", lineno);
      have_layout = true;
    } else if (kw == "INSTANCE") {
      if (!have_layout) throw DesignError("INSTANCE before LAYOUT", lineno);
      if (tok.size() != 5) throw DesignError("INSTANCE expects <name> <type> <x> <y>", lineno);
      Instance inst;
      inst.name = std::string(tok[1]);
      auto t = parse_instance_type(tok[2]);
      if (!t) throw DesignError(fmt::format("unknown type {}", tok[2]), lineno);
      inst.type = *t;
      inst.x = detail::parse_double(tok[3], lineno);
      inst.y = detail::parse_double(tok[4], lineno);
      validate_instance(d, inst, lineno);
      if (!names.insert(inst.name).second)
        throw DesignError(fmt::format("duplicate instance name {}", inst.name), lineno);
      d.instances.push_back(std::move(inst));
    } else if (kw == "NET") {
      if (tok.size() < 3) throw DesignError("NET expects <name> <pin_count> <inst.pin>...", lineno);
      Net net;
      net.name = std::string(tok[1]);
      const int count = detail::parse_int(tok[2], lineno);
      if (count < 0 || static_cast<std::size_t>(count) != tok.size() - 3)
        throw DesignError(fmt::format("net {} declares {} pins but lists {}", net.name, count,
                                      tok.size() - 3),
                          lineno);
      for (std::size_t i = 3; i < tok.size(); ++i) {
        const auto dot = tok[i].rfind('.');
        if (dot == std::string_view::npos || dot == 0 || dot + 1 == tok[i].size())
          throw DesignError(fmt::format("malformed pin reference {}", tok[i]), lineno);
        net.pins.push_back({std::string(tok[i].substr(0, dot)), std::string(tok[i].substr(dot + 1))});
      }
      pending_nets.emplace_back(std::move(net), lineno);
    } else {
      throw DesignError(fmt::format("syntax error: unknown keyword {}", kw), lineno);
    }
  }
  if (!have_layout) throw DesignError("missing LAYOUT line");

  NetChecker checker(d);
  for (auto& [net, line] : pending_nets) {
    checker.check(net, line);
    d.nets.push_back(std::move(net));
  }
  return d;
}

void canonicalize(PlacementDesign& d) {
  std::sort(d.instances.begin(), d.instances.end(),
            [](const Instance& a, const Instance& b) { return a.name < b.name; });
  std::sort(d.nets.begin(), d.nets.end(),
            [](const Net& a, const Net& b) { return a.name < b.name; });
}

std::string write_design(const PlacementDesign& design) {
  PlacementDesign d = design;
  canonicalize(d);
  fmt::memory_buffer out;
  fmt::format_to(std::back_inserter(out), "LAYOUT {} {}\n", d.layout_w, d.layout_h);
  for (const auto& inst : d.instances)
    fmt::format_to(std::back_inserter(out), "INSTANCE {} {} {} {}\n", inst.name,
                   to_string(inst.type), inst.x, inst.y);
  for (const auto& net : d.nets) {
    fmt::format_to(std::back_inserter(out), "NET {} {}", net.name, net.pins.size());
    for (const auto& p : net.pins) fmt::format_to(std::back_inserter(out), " {}.{}", p.instance, p.pin);
    out.push_back('\n');
  }
  return fmt::to_string(out);
}

std::size_t LabelSet::minority_count() const {
  return static_cast<std::size_t>(
      std::count_if(labels.begin(), labels.end(), [](const auto& kv) { return kv.second == 1; }));
}

double LabelSet::minority_fraction() const {
  if (labels.empty()) return 0.0;
  return static_cast<double>(minority_count()) / static_cast<double>(labels.size());
}

LabelSet parse_labels(std::string_view text) {
  LabelSet out;
  std::size_t lineno = 0;
  for (std::string_view raw : detail::split_lines(text)) {
    ++lineno;
    const auto tok = detail::tokenize(detail::strip_comment(raw));
    if (tok.empty()) continue;
    if (tok.size() != 2) throw DesignError("label line expects <instance_name> <0|1>", lineno);
    if (tok[1] != "0" && tok[1] != "1")
      throw DesignError(fmt::format("label not in {{0,1}} for {}: {}", tok[0], tok[1]), lineno);
    if (!out.labels.emplace(std::string(tok[0]), tok[1] == "1" ? 1 : 0).second)
      throw DesignError(fmt::format("duplicate label for {}", tok[0]), lineno);
  }
  return out;
}

LabelSet parse_labels(std::string_view text, const PlacementDesign& design) {
  LabelSet out = parse_labels(text);
  const auto index = design.instance_index();
  for (const auto& [name, label] : out.labels)
    if (!index.contains(name)) throw DesignError(fmt::format("unknown instance {}", name));
  for (const auto& inst : design.instances)
    if (!out.labels.contains(inst.name))
      throw DesignError(fmt::format("missing instance {}", inst.name));
  return out;
}

std::string write_labels(const LabelSet& labels) {
  fmt::memory_buffer out;
  for (const auto& [name, label] : labels.labels)
    fmt::format_to(std::back_inserter(out), "{} {}\n", name, label);
  return fmt::to_string(out);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace imlg
