#include "beclab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "beclab/errors.hpp"

namespace beclab {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::istringstream is(s);
    std::string item;
    while (std::getline(is, item, sep)) parts.push_back(trim(item));
    return parts;
}

} // namespace

IniFile IniFile::parse_string(const std::string& text) {
    IniFile ini;
    std::istringstream is(text);
    std::string line, section;
    int lineNo = 0;
    while (std::getline(is, line)) {
        ++lineNo;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineNo) + ": unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineNo) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineNo) + ": empty key");
        ini.data_[section][key] = value;
    }
    return ini;
}

IniFile IniFile::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config file not found: " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_string(ss.str());
}

bool IniFile::has(const std::string& section, const std::string& key) const {
    auto s = data_.find(section);
    return s != data_.end() && s->second.count(key) > 0;
}

std::string IniFile::get(const std::string& section, const std::string& key,
                         const std::string& fallback) const {
    auto s = data_.find(section);
    if (s == data_.end()) return fallback;
    auto k = s->second.find(key);
    return k == s->second.end() ? fallback : k->second;
}

double IniFile::get_double(const std::string& section, const std::string& key,
                           double fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key, "");
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value for " + section + "." + key + ": " + v);
    }
}

long IniFile::get_long(const std::string& section, const std::string& key, long fallback) const {
    const double d = get_double(section, key, static_cast<double>(fallback));
    const long l = static_cast<long>(std::llround(d));
    if (std::abs(d - l) > 1e-9)
        throw ConfigError("config: integer expected for " + section + "." + key);
    return l;
}

std::vector<double> IniFile::get_list(const std::string& section, const std::string& key,
                                      const std::vector<double>& fallback) const {
    if (!has(section, key)) return fallback;
    std::vector<double> out;
    for (const std::string& item : split(get(section, key, ""), ',')) {
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("config: bad list entry for " + section + "." + key + ": " + item);
        }
    }
    if (out.empty()) throw ConfigError("config: empty list for " + section + "." + key);
    return out;
}

RunConfig RunConfig::from_ini(const IniFile& ini) {
    RunConfig c;
    c.d = static_cast<int>(ini.get_long("model", "d", c.d));
    c.L = ini.get_double("model", "L", c.L);
    c.n = static_cast<int>(ini.get_long("model", "n", c.n));

    const std::string trap = ini.get("potentials", "trap", "");
    if (!trap.empty()) {
        auto parts = split(trap, ':');
        c.trapKind = parts[0];
        c.trapParams.clear();
        for (std::size_t i = 1; i < parts.size(); ++i) c.trapParams.push_back(std::stod(parts[i]));
        if (c.trapParams.empty()) c.trapParams.push_back(1.0);
    }
    const std::string pair = ini.get("potentials", "pair", "");
    if (!pair.empty()) {
        auto parts = split(pair, ':');
        c.pairKind = parts[0];
        c.pairParams.clear();
        for (std::size_t i = 1; i < parts.size(); ++i) c.pairParams.push_back(std::stod(parts[i]));
    }

    auto nsD = ini.get_list("sweep", "N", std::vector<double>(c.Ns.begin(), c.Ns.end()));
    c.Ns.clear();
    for (double v : nsD) c.Ns.push_back(static_cast<int>(std::llround(v)));
    c.betas = ini.get_list("sweep", "beta", c.betas);
    c.lambdas = ini.get_list("sweep", "lambda", c.lambdas);

    c.dt = ini.get_double("sde", "dt", c.dt);
    c.T = ini.get_double("sde", "T", c.T);
    c.M = ini.get_long("sde", "M", c.M);
    c.seed = static_cast<std::uint64_t>(ini.get_long("sde", "seed", static_cast<long>(c.seed)));
    c.frames = static_cast<int>(ini.get_long("sde", "frames", c.frames));

    c.tau = ini.get_double("solver", "tau", c.tau);
    c.maxIterations = ini.get_long("solver", "max_iterations", c.maxIterations);
    c.energyTolerance = ini.get_double("solver", "energy_tolerance", c.energyTolerance);
    c.residualTolerance = ini.get_double("solver", "residual_tolerance", c.residualTolerance);
    c.pointBudget = static_cast<std::size_t>(
        ini.get_long("solver", "budget", static_cast<long>(c.pointBudget)));

    c.t = ini.get_double("chaos", "t", c.t);

    c.outputDirectory = ini.get("output", "directory", c.outputDirectory);
    c.formats = ini.get("output", "formats", c.formats);
    return c;
}

RunConfig RunConfig::load(const std::string& path) {
    if (path.empty()) {
        RunConfig c;
        c.validate();
        return c;
    }
    RunConfig c = from_ini(IniFile::parse_file(path));
    c.validate();
    return c;
}

void RunConfig::validate() const {
    if (d < 1 || d > 3) throw ConfigError("config: model.d must be 1..3");
    if (n < 8) throw ConfigError("config: model.n must be >= 8");
    if (!(L > 0.0)) throw ConfigError("config: model.L must be positive");
    for (int N : Ns)
        if (N < 2 || N > 4) throw ConfigError("config: sweep.N entries must be in [2,4]");
    for (double b : betas)
        if (!(b >= 0.0) || !(b < 1.0)) throw ConfigError("config: sweep.beta entries in [0,1)");
    for (double l : lambdas)
        if (!(l > 0.0)) throw ConfigError("config: sweep.lambda entries must be positive");
    if (!(dt > 0.0) || !(T >= dt)) throw ConfigError("config: sde.dt > 0 and sde.T >= dt");
    if (M < 1) throw ConfigError("config: sde.M >= 1");
    if (frames < 2) throw ConfigError("config: sde.frames >= 2");
    if (!(energyTolerance > 0.0) || !(residualTolerance > 0.0))
        throw ConfigError("config: solver tolerances must be positive");
    if (!(t >= 0.0)) throw ConfigError("config: chaos.t >= 0");
    makeTrap();
    makePair();
}

TrapPotential RunConfig::makeTrap() const {
    const double c0 = trapParams.empty() ? 1.0 : trapParams[0];
    if (trapKind == "harmonic") return TrapPotential::harmonic(c0);
    if (trapKind == "quartic") return TrapPotential::quartic(c0);
    throw ConfigError("config: unknown trap kind: " + trapKind);
}

PairPotential RunConfig::makePair() const {
    if (pairKind == "zero") return PairPotential::zero();
    if (pairParams.size() < 2)
        throw ConfigError("config: pair potential needs amplitude:supportRadius");
    if (pairKind == "bump") return PairPotential::bump(pairParams[0], pairParams[1]);
    if (pairKind == "parabolic") return PairPotential::parabolic(pairParams[0], pairParams[1]);
    if (pairKind == "indicator") return PairPotential::indicator(pairParams[0], pairParams[1]);
    throw ConfigError("config: unknown pair potential kind: " + pairKind);
}

FlowParams RunConfig::flowParams() const {
    FlowParams p;
    p.timeStep = tau;
    p.maxIterations = maxIterations;
    p.energyTolerance = energyTolerance;
    p.residualTolerance = residualTolerance;
    return p;
}

std::string RunConfig::trapDescriptor() const { return makeTrap().describe(); }
std::string RunConfig::pairDescriptor() const { return makePair().describe(); }

std::string RunConfig::solverDescriptor() const {
    std::ostringstream os;
    os << "tau=" << tau << ";maxIter=" << maxIterations << ";eTol=" << energyTolerance
       << ";rTol=" << residualTolerance;
    return os.str();
}

} // namespace beclab
