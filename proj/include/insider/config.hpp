#pragma once

#include "insider/model.hpp"

#include <iosfwd>
#include <string>

namespace insider {

// "0.15" or "0:0.15, 0.5:0.2" (start:value pairs, first start 0).
PiecewiseConstant parse_piecewise(const std::string& text);
std::string format_piecewise(const PiecewiseConstant& f);

struct RunSettings {
    ScenarioConfig scenario;
    unsigned threads = 0;
    std::string out_dir;
};

// Figure-caption baseline: mu0 = 0.15, sigma = 0.35, r = 0, T = 1, X0 = 1,
// no insider, robust, 200 steps, 10^4 paths.
ScenarioConfig default_scenario();

// INI file with sections [market], [insider], [run]; keys absent from the
// file keep their value in `base`. Unknown sections or keys are rejected.
RunSettings load_config(const std::string& path, RunSettings base);
RunSettings parse_config(std::istream& is, RunSettings base);

void write_config(std::ostream& os, const RunSettings& settings);

} // namespace insider
