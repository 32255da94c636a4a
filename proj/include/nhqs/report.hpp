// Deterministic tabular output.  CSV cells print with 17 significant digits
// (binary64 round-trip safe); JSON goes through nlohmann with plain doubles,
// which also round-trips.  Identical inputs produce byte-identical output.
#ifndef NHQS_REPORT_HPP
#define NHQS_REPORT_HPP

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nhqs/dynamics.hpp"
#include "nhqs/run_config.hpp"
#include "nhqs/scattering.hpp"

namespace nhqs {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace report_detail {

inline nlohmann::json complex_json(Complex v) {
    return nlohmann::json::array({v.real(), v.imag()});
}

inline nlohmann::json matrix_json(const ChannelMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.size(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < m.size(); ++j) row.push_back(complex_json(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

inline void matrix_csv_header(std::ostringstream& os, const std::string& name, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            os << ',' << name << '_' << i << j << "_re" << ',' << name << '_' << i << j
               << "_im";
}

inline void matrix_csv_cells(std::ostringstream& os, const ChannelMatrix& m) {
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j)
            os << ',' << fmt17(m(i, j).real()) << ',' << fmt17(m(i, j).imag());
}

inline void matrix_csv_nans(std::ostringstream& os, std::size_t n) {
    for (std::size_t i = 0; i < 2 * n * n; ++i) os << ",nan";
}

}  // namespace report_detail

// --- scan ------------------------------------------------------------------

inline std::string render_scan_csv(const std::vector<ScanRecord>& records, std::size_t n) {
    std::ostringstream os;
    os << "E,k0_re,k0_im";
    for (const char* name : {"t1", "t2", "r1", "r2"})
        report_detail::matrix_csv_header(os, name, n);
    os << ",residual,flag\n";
    for (const auto& rec : records) {
        os << fmt17(rec.energy.energy.real()) << ',' << fmt17(rec.energy.k0.real()) << ','
           << fmt17(rec.energy.k0.imag());
        if (rec.coeffs) {
            report_detail::matrix_csv_cells(os, rec.coeffs->t1);
            report_detail::matrix_csv_cells(os, rec.coeffs->t2);
            report_detail::matrix_csv_cells(os, rec.coeffs->r1);
            report_detail::matrix_csv_cells(os, rec.coeffs->r2);
            os << ',' << fmt17(rec.duality_residual);
        } else {
            for (int b = 0; b < 4; ++b) report_detail::matrix_csv_nans(os, n);
            os << ",nan";
        }
        os << ',' << to_string(rec.status) << '\n';
    }
    return os.str();
}

inline std::string render_scan_json(const std::vector<ScanRecord>& records, std::size_t n) {
    nlohmann::json out;
    out["channels"] = n;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& rec : records) {
        nlohmann::json r;
        r["E"] = rec.energy.energy.real();
        r["k0"] = report_detail::complex_json(rec.energy.k0);
        r["flag"] = to_string(rec.status);
        if (rec.coeffs) {
            r["t1"] = report_detail::matrix_json(rec.coeffs->t1);
            r["t2"] = report_detail::matrix_json(rec.coeffs->t2);
            r["r1"] = report_detail::matrix_json(rec.coeffs->r1);
            r["r2"] = report_detail::matrix_json(rec.coeffs->r2);
            r["residual"] = rec.duality_residual;
        } else {
            r["error"] = rec.detail;
        }
        arr.push_back(r);
    }
    out["records"] = arr;
    return out.dump(2) + "\n";
}

// --- scatter ---------------------------------------------------------------

struct ScatterReport {
    EnergyPoint energy;
    std::optional<SMatrixPair> smatrix;
    std::optional<ScatteringCoefficients> coeffs;
    ScanStatus status = ScanStatus::Ok;
    std::string detail;
};

inline std::string render_scatter_csv(const ScatterReport& rep, std::size_t n) {
    std::ostringstream os;
    os << "E,k0_re,k0_im";
    for (const char* name : {"s_plus_11", "s_plus_12", "s_plus_21", "s_plus_22", "s_minus_11",
                             "s_minus_12", "s_minus_21", "s_minus_22"})
        report_detail::matrix_csv_header(os, name, n);
    for (const char* name : {"t1", "t2", "r1", "r2"})
        report_detail::matrix_csv_header(os, name, n);
    os << ",residual,flag\n";

    os << fmt17(rep.energy.energy.real()) << ',' << fmt17(rep.energy.k0.real()) << ','
       << fmt17(rep.energy.k0.imag());
    if (rep.smatrix && rep.coeffs) {
        for (const ChannelMatrix* m :
             {&rep.smatrix->s_plus.b11, &rep.smatrix->s_plus.b12, &rep.smatrix->s_plus.b21,
              &rep.smatrix->s_plus.b22, &rep.smatrix->s_minus.b11, &rep.smatrix->s_minus.b12,
              &rep.smatrix->s_minus.b21, &rep.smatrix->s_minus.b22})
            report_detail::matrix_csv_cells(os, *m);
        report_detail::matrix_csv_cells(os, rep.coeffs->t1);
        report_detail::matrix_csv_cells(os, rep.coeffs->t2);
        report_detail::matrix_csv_cells(os, rep.coeffs->r1);
        report_detail::matrix_csv_cells(os, rep.coeffs->r2);
        os << ',' << fmt17(rep.smatrix->duality_residual);
    } else {
        for (int b = 0; b < 12; ++b) report_detail::matrix_csv_nans(os, n);
        os << ",nan";
    }
    os << ',' << to_string(rep.status) << '\n';
    return os.str();
}

inline std::string render_scatter_json(const ScatterReport& rep, std::size_t n) {
    nlohmann::json out;
    out["channels"] = n;
    out["E"] = rep.energy.energy.real();
    out["k0"] = report_detail::complex_json(rep.energy.k0);
    out["flag"] = to_string(rep.status);
    if (rep.smatrix && rep.coeffs) {
        nlohmann::json sp, sm;
        sp["b11"] = report_detail::matrix_json(rep.smatrix->s_plus.b11);
        sp["b12"] = report_detail::matrix_json(rep.smatrix->s_plus.b12);
        sp["b21"] = report_detail::matrix_json(rep.smatrix->s_plus.b21);
        sp["b22"] = report_detail::matrix_json(rep.smatrix->s_plus.b22);
        sm["b11"] = report_detail::matrix_json(rep.smatrix->s_minus.b11);
        sm["b12"] = report_detail::matrix_json(rep.smatrix->s_minus.b12);
        sm["b21"] = report_detail::matrix_json(rep.smatrix->s_minus.b21);
        sm["b22"] = report_detail::matrix_json(rep.smatrix->s_minus.b22);
        out["s_plus"] = sp;
        out["s_minus"] = sm;
        out["t1"] = report_detail::matrix_json(rep.coeffs->t1);
        out["t2"] = report_detail::matrix_json(rep.coeffs->t2);
        out["r1"] = report_detail::matrix_json(rep.coeffs->r1);
        out["r2"] = report_detail::matrix_json(rep.coeffs->r2);
        out["residual"] = rep.smatrix->duality_residual;
    } else {
        out["error"] = rep.detail;
    }
    return out.dump(2) + "\n";
}

// --- evolve ----------------------------------------------------------------

inline std::string render_evolve_csv(const std::vector<EvolveRecord>& rows) {
    std::ostringstream os;
    os << "t,norm_re,norm_im,max_psi_r,max_psi_l\n";
    for (const auto& r : rows)
        os << fmt17(r.t) << ',' << fmt17(r.norm.real()) << ',' << fmt17(r.norm.imag()) << ','
           << fmt17(r.max_abs_r) << ',' << fmt17(r.max_abs_l) << '\n';
    return os.str();
}

inline double norm_drift_max(const std::vector<EvolveRecord>& rows) {
    if (rows.empty()) return 0.0;
    double drift = 0.0;
    for (const auto& r : rows) drift = std::max(drift, std::abs(r.norm - rows.front().norm));
    return drift;
}

inline std::string render_evolve_json(const EvolveResult& res) {
    nlohmann::json out;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : res.records) {
        nlohmann::json row;
        row["t"] = r.t;
        row["norm"] = report_detail::complex_json(r.norm);
        row["max_psi_r"] = r.max_abs_r;
        row["max_psi_l"] = r.max_abs_l;
        arr.push_back(row);
    }
    out["rows"] = arr;
    out["norm_drift_max"] = norm_drift_max(res.records);
    out["delta_bump_width"] = res.delta_bump_width;
    return out.dump(2) + "\n";
}

}  // namespace nhqs

#endif  // NHQS_REPORT_HPP
