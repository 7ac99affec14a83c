#pragma once

#include <map>
#include <optional>
#include <string>

namespace oscbound {

// Calibration constants that the inequalities leave unspecified: the D
// factors of sublevel_envelope per (delta, eps) pair and the c_p' factors of
// vdc_sublevel_bound. Values are computed once by brute-force oracles
// (`compute`) and stored in a plain-text key=value file; see
// docs/formats.md.
class CalibrationTable {
public:
    static CalibrationTable compute();
    static CalibrationTable load(const std::string& path);
    void save(const std::string& path) const;

    std::optional<double> get(const std::string& key) const;
    double require(const std::string& key) const;
    void set(const std::string& key, double v) { kv_[key] = v; }

    static std::string envelope_D_key(double delta, double eps);
    static std::string vdc_c_key(int p);

    std::optional<double> envelope_D(double delta, double eps) const {
        return get(envelope_D_key(delta, eps));
    }
    std::optional<double> vdc_c(int p) const { return get(vdc_c_key(p)); }

    const std::map<std::string, double>& entries() const { return kv_; }

private:
    std::map<std::string, double> kv_;
};

}  // namespace oscbound
