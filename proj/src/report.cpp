#include "beclab/report.hpp"

#include <cstdio>
#include <sstream>

namespace beclab {

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string chaos_report_json(const ChaosReport& r) {
    std::ostringstream os;
    os << "{";
    os << "\"N\": " << r.N << ", ";
    os << "\"beta\": " << format_g17(r.beta) << ", ";
    os << "\"t\": " << format_g17(r.t) << ", ";
    os << "\"driftMismatch\": " << format_g17(r.driftMismatch) << ", ";
    os << "\"normalizedEntropy\": " << format_g17(r.normalizedEntropy) << ", ";
    os << "\"kMarginalEntropy\": [";
    for (std::size_t i = 0; i < r.kMarginalEntropy.size(); ++i) {
        if (i) os << ", ";
        os << format_g17(r.kMarginalEntropy[i]);
    }
    os << "], ";
    os << "\"kMarginalTV\": [";
    for (std::size_t i = 0; i < r.kMarginalTV.size(); ++i) {
        if (i) os << ", ";
        os << format_g17(r.kMarginalTV[i]);
    }
    os << "], ";
    os << "\"fisherNormalized\": " << format_g17(r.fisherNormalized) << ", ";
    os << "\"kacMetric\": " << format_g17(r.kacMetric) << ", ";
    os << "\"identityGap\": " << format_g17(r.identityGap);
    os << "}";
    return os.str();
}

std::string chaos_report_csv_header(int maxK) {
    std::ostringstream os;
    os << "N,beta,t,driftMismatch,normalizedEntropy";
    for (int k = 1; k <= maxK; ++k) os << ",kMarginalEntropy" << k;
    for (int k = 1; k <= maxK; ++k) os << ",kMarginalTV" << k;
    os << ",fisherNormalized,kacMetric,identityGap";
    return os.str();
}

std::string chaos_report_csv_row(const ChaosReport& r, int maxK) {
    std::ostringstream os;
    os << r.N << "," << format_g17(r.beta) << "," << format_g17(r.t) << ","
       << format_g17(r.driftMismatch) << "," << format_g17(r.normalizedEntropy);
    for (int k = 1; k <= maxK; ++k) {
        os << ",";
        if (k <= static_cast<int>(r.kMarginalEntropy.size()))
            os << format_g17(r.kMarginalEntropy[static_cast<std::size_t>(k - 1)]);
    }
    for (int k = 1; k <= maxK; ++k) {
        os << ",";
        if (k <= static_cast<int>(r.kMarginalTV.size()))
            os << format_g17(r.kMarginalTV[static_cast<std::size_t>(k - 1)]);
    }
    os << "," << format_g17(r.fisherNormalized) << "," << format_g17(r.kacMetric) << ","
       << format_g17(r.identityGap);
    return os.str();
}

} // namespace beclab
