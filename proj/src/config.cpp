#include "insider/config.hpp"

#include "insider/csv.hpp"
#include "insider/error.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>
#include <ostream>
#include <set>

namespace insider {

namespace {

double parse_number(const std::string& raw, const std::string& key) {
    const std::string s = boost::trim_copy(raw);
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (s.empty() || pos != s.size())
        fail(ErrorKind::Validation, "config_not_a_number", "value of '" + key + "' is not a number: " + raw);
    return v;
}

bool parse_bool(const std::string& raw, const std::string& key) {
    const std::string s = boost::to_lower_copy(boost::trim_copy(raw));
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    fail(ErrorKind::Validation, "config_not_a_bool", "value of '" + key + "' is not a boolean: " + raw);
}

std::int64_t parse_integer(const std::string& raw, const std::string& key) {
    const double v = parse_number(raw, key);
    if (v != std::floor(v) || std::abs(v) > 9.0e15)
        fail(ErrorKind::Validation, "config_not_an_integer", "value of '" + key + "' is not an integer: " + raw);
    return static_cast<std::int64_t>(v);
}

} // namespace

PiecewiseConstant parse_piecewise(const std::string& text) {
    const std::string s = boost::trim_copy(text);
    if (s.find(':') == std::string::npos) return PiecewiseConstant(parse_number(s, "coefficient"));
    std::vector<std::string> parts;
    boost::split(parts, s, boost::is_any_of(","));
    std::vector<double> starts, values;
    for (const auto& part : parts) {
        std::vector<std::string> kv;
        boost::split(kv, part, boost::is_any_of(":"));
        if (kv.size() != 2)
            fail(ErrorKind::Validation, "breakpoints_malformed", "expected start:value pairs, got '" + part + "'");
        starts.push_back(parse_number(kv[0], "breakpoint"));
        values.push_back(parse_number(kv[1], "coefficient"));
    }
    return PiecewiseConstant(std::move(starts), std::move(values));
}

std::string format_piecewise(const PiecewiseConstant& f) {
    if (f.is_constant()) return format_double(f.values()[0]);
    std::string out;
    for (std::size_t j = 0; j < f.values().size(); ++j) {
        if (j) out += ", ";
        out += format_double(f.starts()[j]) + ":" + format_double(f.values()[j]);
    }
    return out;
}

ScenarioConfig default_scenario() {
    ScenarioConfig c;
    c.market.r = PiecewiseConstant(0.0);
    c.market.mu0 = PiecewiseConstant(0.15);
    c.market.sigma = PiecewiseConstant(0.35);
    c.market.varrho = PiecewiseConstant(0.0);
    c.market.T = 1.0;
    c.market.X0 = 1.0;
    c.insider.kind = InsiderKind::NoInsider;
    c.insider.T0 = 2.0;
    return c;
}

RunSettings parse_config(std::istream& is, RunSettings base) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(is, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        fail(ErrorKind::Validation, "config_syntax", std::string("config syntax error: ") + e.what());
    }
    MarketParams& m = base.scenario.market;
    InsiderSpec& ins = base.scenario.insider;
    ScenarioConfig& sc = base.scenario;
    for (const auto& [section, keys] : tree) {
        if (keys.empty() && !keys.data().empty())
            fail(ErrorKind::Validation, "config_key_outside_section", "key '" + section + "' outside a section");
        for (const auto& [key, node] : keys) {
            const std::string v = node.get_value<std::string>();
            const std::string where = section + "." + key;
            if (section == "market") {
                if (key == "r") m.r = parse_piecewise(v);
                else if (key == "mu0") m.mu0 = parse_piecewise(v);
                else if (key == "sigma") m.sigma = parse_piecewise(v);
                else if (key == "varrho") m.varrho = parse_piecewise(v);
                else if (key == "T") m.T = parse_number(v, where);
                else if (key == "X0") m.X0 = parse_number(v, where);
                else if (key == "eps") m.eps = parse_number(v, where);
                else fail(ErrorKind::Validation, "unknown_config_key", "unknown key " + where);
            } else if (section == "insider") {
                if (key == "kind") ins.kind = insider_kind_from_string(boost::trim_copy(v));
                else if (key == "T0") ins.T0 = parse_number(v, where);
                else if (key == "phi_weight") ins.phi_weight = parse_piecewise(v);
                else fail(ErrorKind::Validation, "unknown_config_key", "unknown key " + where);
            } else if (section == "run") {
                if (key == "robust") sc.robust = parse_bool(v, where);
                else if (key == "n_steps") sc.n_steps = static_cast<int>(parse_integer(v, where));
                else if (key == "n_steps_tail") sc.n_steps_tail = static_cast<int>(parse_integer(v, where));
                else if (key == "n_paths") sc.n_paths = parse_integer(v, where);
                else if (key == "seed") sc.seed = static_cast<std::uint64_t>(parse_integer(v, where));
                else if (key == "threads") base.threads = static_cast<unsigned>(parse_integer(v, where));
                else if (key == "out") base.out_dir = boost::trim_copy(v);
                else fail(ErrorKind::Validation, "unknown_config_key", "unknown key " + where);
            } else {
                fail(ErrorKind::Validation, "unknown_config_section", "unknown section [" + section + "]");
            }
        }
    }
    return base;
}

RunSettings load_config(const std::string& path, RunSettings base) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Validation, "config_unreadable", "cannot read config file " + path);
    return parse_config(in, std::move(base));
}

void write_config(std::ostream& os, const RunSettings& s) {
    const MarketParams& m = s.scenario.market;
    const InsiderSpec& ins = s.scenario.insider;
    os << "[market]\n"
       << "r = " << format_piecewise(m.r) << "\n"
       << "mu0 = " << format_piecewise(m.mu0) << "\n"
       << "sigma = " << format_piecewise(m.sigma) << "\n"
       << "varrho = " << format_piecewise(m.varrho) << "\n"
       << "T = " << format_double(m.T) << "\n"
       << "X0 = " << format_double(m.X0) << "\n"
       << "eps = " << format_double(m.eps) << "\n"
       << "[insider]\n"
       << "kind = " << to_string(ins.kind) << "\n"
       << "T0 = " << format_double(ins.T0) << "\n"
       << "phi_weight = " << format_piecewise(ins.phi_weight) << "\n"
       << "[run]\n"
       << "robust = " << (s.scenario.robust ? "true" : "false") << "\n"
       << "n_steps = " << s.scenario.n_steps << "\n"
       << "n_steps_tail = " << s.scenario.n_steps_tail << "\n"
       << "n_paths = " << s.scenario.n_paths << "\n"
       << "seed = " << s.scenario.seed << "\n"
       << "threads = " << s.threads << "\n";
}

} // namespace insider
