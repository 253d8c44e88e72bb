#include "smilewing/smilewing.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <limits>
#include <new>
#include <string>

#include "smilewing/blackscholes.hpp"
#include "smilewing/errors.hpp"
#include "smilewing/harness.hpp"
#include "smilewing/pricing.hpp"
#include "smilewing/wings.hpp"

struct sw_config {
    smilewing::Config cfg;
};

struct sw_model {
    smilewing::ModelSpec model;
};

struct sw_report {
    smilewing::RunOutput out;
};

namespace {

thread_local std::string last_error;

sw_status fail(sw_status s, const char* what) {
    last_error = what;
    return s;
}

template <class F>
sw_status guarded(F&& f) {
    using namespace smilewing;
    try {
        last_error.clear();
        f();
        return SW_OK;
    } catch (const Error& e) {
        switch (e.kind()) {
            case ErrorKind::invalid_argument: return fail(SW_INVALID_ARGUMENT, e.what());
            case ErrorKind::config: return fail(SW_CONFIG_ERROR, e.what());
            case ErrorKind::condition: return fail(SW_CONDITION_REFUSED, e.what());
            case ErrorKind::numerical: return fail(SW_NUMERICAL_FAILURE, e.what());
            case ErrorKind::domain: return fail(SW_DOMAIN_ERROR, e.what());
        }
        return fail(SW_INTERNAL_ERROR, e.what());
    } catch (const std::bad_alloc&) {
        return fail(SW_INTERNAL_ERROR, "out of memory");
    } catch (const std::exception& e) {
        return fail(SW_INTERNAL_ERROR, e.what());
    } catch (...) {
        return fail(SW_INTERNAL_ERROR, "unknown error");
    }
}

#define SW_REQUIRE(cond, msg) \
    if (!(cond)) throw smilewing::InvalidArgument(msg)

}  // namespace

extern "C" {

const char* sw_last_error(void) { return last_error.c_str(); }

const char* sw_version(void) { return "0.1.0"; }

int sw_config_version(void) { return smilewing::kConfigVersion; }

sw_status sw_config_parse(const char* ini_text, sw_config** out) {
    return guarded([&] {
        SW_REQUIRE(out, "sw_config_parse: out is NULL");
        *out = nullptr;
        auto* c = new sw_config{smilewing::Config::parse(ini_text ? ini_text : "")};
        *out = c;
    });
}

sw_status sw_config_set(sw_config* cfg, const char* assignment) {
    return guarded([&] {
        SW_REQUIRE(cfg && assignment, "sw_config_set: NULL argument");
        cfg->cfg.apply_override(assignment);
    });
}

void sw_config_free(sw_config* cfg) { delete cfg; }

sw_status sw_run(const char* subcommand, const sw_config* cfg, sw_report** out) {
    return guarded([&] {
        SW_REQUIRE(subcommand && cfg && out, "sw_run: NULL argument");
        *out = nullptr;
        *out = new sw_report{smilewing::run(subcommand, cfg->cfg)};
    });
}

const char* sw_report_csv(const sw_report* report) { return report ? report->out.csv.c_str() : ""; }
const char* sw_report_json(const sw_report* report) { return report ? report->out.json.c_str() : ""; }
const char* sw_report_summary_json(const sw_report* report) {
    return report ? report->out.summary_json.c_str() : "";
}
void sw_report_free(sw_report* report) { delete report; }

sw_status sw_model_create(const sw_config* cfg, sw_model** out) {
    return guarded([&] {
        SW_REQUIRE(cfg && out, "sw_model_create: NULL argument");
        *out = nullptr;
        *out = new sw_model{smilewing::build_model(cfg->cfg)};
    });
}

void sw_model_free(sw_model* model) { delete model; }

sw_status sw_model_describe(const sw_model* model, char* buf, size_t len, size_t* needed) {
    return guarded([&] {
        SW_REQUIRE(model, "sw_model_describe: NULL model");
        const std::string d = model->model.describe();
        if (needed) *needed = d.size() + 1;
        if (buf && len > 0) {
            const size_t n = std::min(len - 1, d.size());
            std::memcpy(buf, d.data(), n);
            buf[n] = '\0';
        }
    });
}

sw_status sw_model_log_mgf(const sw_model* model, double z, double* out) {
    return guarded([&] {
        SW_REQUIRE(model && out, "sw_model_log_mgf: NULL argument");
        *out = model->model.log_mgf(z);
    });
}

sw_status sw_model_critical_moments(const sw_model* model, double* p_plus, double* q_minus) {
    return guarded([&] {
        SW_REQUIRE(model && p_plus && q_minus, "sw_model_critical_moments: NULL argument");
        const auto c = model->model.critical_moments();
        *p_plus = c.p_plus;
        *q_minus = c.q_minus;
    });
}

sw_status sw_model_log_tail(const sw_model* model, double k, sw_side side, double* out) {
    return guarded([&] {
        SW_REQUIRE(model && out, "sw_model_log_tail: NULL argument");
        SW_REQUIRE(side == SW_RIGHT || side == SW_LEFT, "sw_model_log_tail: bad side");
        *out = smilewing::tail_cdf(model->model, k, side == SW_RIGHT ? smilewing::Side::right : smilewing::Side::left);
    });
}

sw_status sw_model_otm_price(const sw_model* model, double k, double* log_price, double* total_vol) {
    return guarded([&] {
        SW_REQUIRE(model, "sw_model_otm_price: NULL model");
        const smilewing::PricingOptions opts;
        const auto pe = smilewing::otm_price(model->model, k, opts);
        if (log_price) *log_price = pe.price.log_price;
        if (total_vol) {
            *total_vol = pe.price.log_price >= opts.log_price_floor ? smilewing::bs::implied_total_vol(pe.price, k)
                                                                    : std::numeric_limits<double>::quiet_NaN();
        }
    });
}

sw_status sw_bs_log_otm_price(double k, double v, double* out) {
    return guarded([&] {
        SW_REQUIRE(out, "sw_bs_log_otm_price: NULL out");
        *out = smilewing::bs::log_otm_price(k, v);
    });
}

sw_status sw_implied_total_vol(double log_price, double k, int is_call, double* out) {
    return guarded([&] {
        SW_REQUIRE(out, "sw_implied_total_vol: NULL out");
        const auto type = is_call ? smilewing::OptionType::call : smilewing::OptionType::put;
        *out = smilewing::bs::implied_total_vol(smilewing::bs::from_log_price(log_price, k, type), k);
    });
}

sw_status sw_psi(double x, double* out) {
    return guarded([&] {
        SW_REQUIRE(out, "sw_psi: NULL out");
        *out = smilewing::psi(x);
    });
}

sw_status sw_psi_inverse(double u, double* out) {
    return guarded([&] {
        SW_REQUIRE(out, "sw_psi_inverse: NULL out");
        *out = smilewing::psi_inverse(u);
    });
}

}  // extern "C"
