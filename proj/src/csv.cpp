#include "kams/csv.hpp"

#include <cstdio>
#include <fstream>

#include "kams/errors.hpp"

namespace kams {

namespace {

std::ofstream open_csv(const std::string& path, const nlohmann::json& config) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open output file: " + path);
    out << "# config: " << config.dump() << "\n";
    return out;
}

// shortest representation that round-trips a double
std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    double back = 0;
    std::sscanf(buf, "%lf", &back);
    for (int prec = 1; prec < 17; ++prec) {
        char probe[32];
        std::snprintf(probe, sizeof probe, "%.*g", prec, v);
        std::sscanf(probe, "%lf", &back);
        if (back == v) return probe;
    }
    return buf;
}

}  // namespace

void write_trace_csv(const std::string& path, const QueueTrace& trace,
                     const nlohmann::json& config) {
    auto out = open_csv(path, config);
    out << "time_s,queue_pkts,active_sources\n";
    for (const auto& s : trace.samples) {
        out << num(s.t) << ',' << num(s.q) << ',' << s.k << '\n';
    }
}

void write_overflow_csv(const std::string& path, const QueueTrace& trace,
                        const nlohmann::json& config) {
    auto out = open_csv(path, config);
    out << "overflow_start_s,overflow_end_s\n";
    for (const auto& iv : trace.overflow_intervals) {
        out << num(iv.start) << ',' << num(iv.end) << '\n';
    }
}

void write_loss_bins_csv(const std::string& path, const LossSeries& series,
                         const nlohmann::json& config) {
    auto out = open_csv(path, config);
    out << "bin_start_s,drops\n";
    for (std::size_t i = 0; i < series.bins.size(); ++i) {
        out << num(series.window_start + static_cast<double>(i) * series.bin_width) << ','
            << series.bins[i] << '\n';
    }
}

void write_ams_curve_csv(const std::string& path, const std::vector<double>& xs,
                         const std::vector<double>& probs, const nlohmann::json& config) {
    auto out = open_csv(path, config);
    out << "x,overflow_prob\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out << num(xs[i]) << ',' << num(probs[i]) << '\n';
    }
}

void write_reports_csv(const std::string& path, const SweepResult& result) {
    auto out = open_csv(path, to_json(result.spec));
    out << "rtt_s,buffer_pkts,nrmse,p_full_model,p_full_ref,mult_err,corrected_mult_err,"
           "spikiness,loss_overflow_ratio\n";
    for (const auto& p : result.points) {
        const auto& r = p.report;
        out << num(p.rtt_s) << ',' << p.buffer_pkts << ',' << num(r.nrmse) << ','
            << num(r.full_buffer_prob_model) << ',' << num(r.full_buffer_prob_ref) << ','
            << num(r.multiplicative_error) << ',' << num(r.corrected_multiplicative_error)
            << ',' << num(r.spikiness) << ',' << num(r.loss_overflow_ratio) << '\n';
    }
}

void write_contour_long_csv(const std::string& path, const SweepResult& result) {
    auto out = open_csv(path, to_json(result.spec));
    out << "metric,rtt_s,buffer_pkts,value\n";
    auto row = [&out](const char* metric, const PointResult& p, double v) {
        out << metric << ',' << num(p.rtt_s) << ',' << p.buffer_pkts << ',' << num(v) << '\n';
    };
    for (const auto& p : result.points) {
        row("nrmse", p, p.report.nrmse);
        row("spikiness", p, p.report.spikiness);
        row("mult_err", p, p.report.multiplicative_error);
        row("corrected_mult_err", p, p.report.corrected_multiplicative_error);
        row("p_full_model", p, p.report.full_buffer_prob_model);
        row("p_full_ref", p, p.report.full_buffer_prob_ref);
        row("loss_overflow_ratio", p, p.report.loss_overflow_ratio);
    }
}

void write_fits_csv(const std::string& path, const SweepResult& result) {
    auto out = open_csv(path, to_json(result.spec));
    out << "rtt_s,buffer_pkts,mu_pkts,sigma_pkts,at_lower_bound\n";
    for (const auto& p : result.points) {
        out << num(p.rtt_s) << ',' << p.buffer_pkts << ',' << num(p.fitted_mu) << ','
            << num(p.fitted_sigma) << ',' << (p.fit_at_lower_bound ? 1 : 0) << '\n';
    }
}

void write_point_status_csv(const std::string& path, const SweepResult& result) {
    auto out = open_csv(path, to_json(result.spec));
    out << "rtt_s,buffer_pkts,status\n";
    for (const auto& p : result.points) {
        std::string status = p.status;
        for (auto& c : status) {
            if (c == ',' || c == '\n') c = ';';
        }
        out << num(p.rtt_s) << ',' << p.buffer_pkts << ',' << status << '\n';
    }
}

void write_exp_sensitivity_csv(const std::string& path, const SweepResult& result) {
    auto out = open_csv(path, to_json(result.spec));
    out << "rtt_s,buffer_pkts,nrmse_tn,nrmse_exp,nrmse_exp_both\n";
    for (const auto& p : result.points) {
        out << num(p.rtt_s) << ',' << p.buffer_pkts << ',' << num(p.report.nrmse) << ','
            << num(p.nrmse_exp) << ',' << num(p.nrmse_exp_both) << '\n';
    }
}

}  // namespace kams
