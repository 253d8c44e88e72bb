// Command-line front end. Talks to the library only through smilewing.h.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "smilewing/smilewing.h"

namespace {

struct Options {
    std::string config_path;
    std::string model;
    std::string side;
    std::string variant;
    std::string tail;
    std::string kind;
    std::string k_min, k_max, k_points;
    std::string threads;
    std::vector<std::string> params;
    std::string out;
    std::string format = "csv";
};

int exit_code(sw_status s) {
    switch (s) {
        case SW_OK: return 0;
        case SW_CONDITION_REFUSED: return 3;
        case SW_NUMERICAL_FAILURE:
        case SW_INTERNAL_ERROR: return 4;
        default: return 2;
    }
}

const char* status_name(sw_status s) {
    switch (s) {
        case SW_OK: return "ok";
        case SW_INVALID_ARGUMENT: return "invalid_argument";
        case SW_CONFIG_ERROR: return "config_error";
        case SW_CONDITION_REFUSED: return "condition_refused";
        case SW_NUMERICAL_FAILURE: return "numerical_failure";
        case SW_DOMAIN_ERROR: return "domain_error";
        case SW_INTERNAL_ERROR: return "internal_error";
    }
    return "?";
}

int report_failure(sw_status s) {
    std::fprintf(stderr, "smilewing: %s: %s\n", status_name(s), sw_last_error());
    return exit_code(s);
}

bool write_file(const std::string& path, const char* text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
    return static_cast<bool>(f);
}

std::string sidecar_path(const std::string& out) {
    const auto dot = out.rfind('.');
    const auto slash = out.find_last_of('/');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash) && out.substr(dot) == ".csv") {
        return out.substr(0, dot) + ".json";
    }
    return out + ".json";
}

int run(const std::string& sub, const Options& o) {
    std::string text;
    if (!o.config_path.empty()) {
        std::ifstream f(o.config_path);
        if (!f) {
            std::fprintf(stderr, "smilewing: config_error: cannot read %s\n", o.config_path.c_str());
            return 2;
        }
        std::ostringstream ss;
        ss << f.rdbuf();
        text = ss.str();
    }
    sw_config* cfg = nullptr;
    sw_status s = sw_config_parse(text.c_str(), &cfg);
    if (s != SW_OK) return report_failure(s);

    std::vector<std::string> sets;
    auto flag = [&](const char* key, const std::string& value) {
        if (!value.empty()) sets.push_back(std::string(key) + "=" + value);
    };
    flag("model.name", o.model);
    flag("run.side", o.side);
    flag("run.variant", o.variant);
    flag("run.tail", o.tail);
    flag("run.kind", o.kind);
    flag("grid.k_min", o.k_min);
    flag("grid.k_max", o.k_max);
    flag("grid.k_points", o.k_points);
    flag("run.threads", o.threads);
    sets.insert(sets.end(), o.params.begin(), o.params.end());
    for (const auto& a : sets) {
        s = sw_config_set(cfg, a.c_str());
        if (s != SW_OK) {
            sw_config_free(cfg);
            return report_failure(s);
        }
    }

    sw_report* rep = nullptr;
    s = sw_run(sub.c_str(), cfg, &rep);
    sw_config_free(cfg);
    if (s != SW_OK) return report_failure(s);

    bool ok = true;
    const char* body = o.format == "json" ? sw_report_json(rep) : sw_report_csv(rep);
    if (o.out.empty()) {
        std::fputs(body, stdout);
    } else {
        ok = write_file(o.out, body);
        if (ok && o.format == "csv") ok = write_file(sidecar_path(o.out), sw_report_summary_json(rep));
    }
    sw_report_free(rep);
    if (!ok) {
        std::fprintf(stderr, "smilewing: cannot write %s\n", o.out.c_str());
        return 4;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Implied volatility wing asymptotics versus exact smiles"};
    app.set_version_flag("--version", sw_version());
    app.require_subcommand(1);

    Options o;
    const std::vector<std::pair<std::string, std::string>> subs = {
        {"smile", "price the strike grid and invert to implied volatility"},
        {"asymptote", "tail-wing slope predictions only"},
        {"compare", "smile against the tail-wing asymptote"},
        {"termstructure", "total variance and psi of the price across maturities"},
        {"regvar", "regular-variation index of a model tail"},
        {"legendre", "Chernoff bounds against the numeric tail"},
    };
    for (const auto& [name, help] : subs) {
        CLI::App* c = app.add_subcommand(name, help);
        c->add_option("--config", o.config_path, "INI config file")->check(CLI::ExistingFile);
        c->add_option("--model", o.model, "bs, nig, fmls, merton, synthetic, nig_twin, symmetric_smile");
        c->add_option("--side", o.side, "right or left");
        c->add_option("--variant", o.variant, "auto, iv, iv', iv'', v");
        c->add_option("--tail", o.tail, "closed_form, legendre, numeric");
        c->add_option("--kind", o.kind, "auto, density, cdf_tail, price");
        c->add_option("--k-min", o.k_min, "smallest strike magnitude");
        c->add_option("--k-max", o.k_max, "largest strike magnitude");
        c->add_option("--k-points", o.k_points, "number of strikes");
        c->add_option("--threads", o.threads, "pricing threads, 0 = all cores");
        c->add_option("-p,--param", o.params, "config override section.key=value (repeatable)");
        c->add_option("--out", o.out, "output file (csv also writes a .json sidecar)");
        c->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    return run(app.get_subcommands().front()->get_name(), o);
}
