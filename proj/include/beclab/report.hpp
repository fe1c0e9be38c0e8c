#ifndef BECLAB_REPORT_HPP
#define BECLAB_REPORT_HPP

#include <string>
#include <vector>

namespace beclab {

// Per-(N, beta) chaos diagnostics at a fixed horizon t.
struct ChaosReport {
    int N = 0;
    double beta = 0.0;
    double t = 0.0;
    double driftMismatch = 0.0;
    double normalizedEntropy = 0.0;          // Hbar(t) = (t/2) driftMismatch
    std::vector<double> kMarginalEntropy;    // k = 1 .. N-1
    std::vector<double> kMarginalTV;         // k = 1 .. N-1
    double fisherNormalized = 0.0;
    double kacMetric = 0.0;
    double identityGap = 0.0;
};

// UTF-8 JSON with the field names above in declaration order.
std::string chaos_report_json(const ChaosReport& r);

// RFC 4180 CSV, '.' decimal, 17 significant digits.
std::string chaos_report_csv_header(int maxK);
std::string chaos_report_csv_row(const ChaosReport& r, int maxK);

// printf("%.17g") formatting shared by every emitter.
std::string format_g17(double v);

} // namespace beclab

#endif
