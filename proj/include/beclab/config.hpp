#ifndef BECLAB_CONFIG_HPP
#define BECLAB_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "beclab/gp.hpp"
#include "beclab/potentials.hpp"

namespace beclab {

// Sectioned key=value plain text ([section] headers, # or ; comments).
class IniFile {
public:
    static IniFile parse_file(const std::string& path);
    static IniFile parse_string(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    long get_long(const std::string& section, const std::string& key, long fallback) const;
    std::vector<double> get_list(const std::string& section, const std::string& key,
                                 const std::vector<double>& fallback) const;

private:
    std::map<std::string, std::map<std::string, std::string>> data_;
};

struct RunConfig {
    // [model]
    int d = 1;
    double L = 8.0;
    int n = 257;

    // [potentials]
    std::string trapKind = "harmonic";
    std::vector<double> trapParams{1.0};
    std::string pairKind = "bump";
    std::vector<double> pairParams{0.9375, 1.0};  // amplitude, support radius (g = 1 in d = 1)

    // [sweep]
    std::vector<int> Ns{2, 3};
    std::vector<double> betas{0.0, 0.5};
    std::vector<double> lambdas{0.5, 1.0, 1.5};

    // [sde]
    double dt = 1e-3;
    double T = 1.0;
    long M = 2000;
    std::uint64_t seed = 20250808;
    int frames = 101;

    // [solver]
    double tau = 0.0;
    long maxIterations = 500000;
    double energyTolerance = 1e-12;
    double residualTolerance = 1e-6;
    std::size_t pointBudget = 10'000'000;

    // [chaos]
    double t = 1.0;

    // [output]
    std::string outputDirectory = "out";
    std::string formats = "csv,json";

    static RunConfig from_ini(const IniFile& ini);
    static RunConfig load(const std::string& path);  // empty path = defaults
    void validate() const;

    TrapPotential makeTrap() const;
    PairPotential makePair() const;
    FlowParams flowParams() const;
    std::string trapDescriptor() const;
    std::string pairDescriptor() const;
    std::string solverDescriptor() const;
};

} // namespace beclab

#endif
