#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>

#include "modrecon/modframe.hpp"
#include "modrecon/reconstruct.hpp"

using namespace modrecon;
using nlohmann::json;

namespace {

json report_to_json(const RunReport& report) {
    json primes = json::array();
    for (const auto& line : report.primes) {
        primes.push_back({{"p", line.prime},
                          {"weight", line.weight},
                          {"status", to_string(line.status)},
                          {"fingerprint", line.fingerprint},
                          {"round", line.round}});
    }
    json cof = json::array(), bad = json::array();
    for (const auto& c : report.cofactors)
        cof.push_back(c.get_str());
    for (const auto& b : report.bad_factors)
        bad.push_back(b.get_str());
    return {{"success", report.success},
            {"rounds", report.rounds},
            {"modulus", report.modulus.get_str()},
            {"nprime_estimate", report.nprime_estimate.get_str()},
            {"cofactors", cof},
            {"bad_factors", bad},
            {"primes", primes}};
}

std::string int_list(const std::vector<Int>& xs) {
    std::string s = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i)
            s += ",";
        s += xs[i].get_str();
    }
    return s + "]";
}

std::string data_file(const std::string& name) {
    if (const char* env = std::getenv("MODRECON_DATA"))
        return std::string(env) + "/" + name;
    return std::string(MODRECON_DATA_DIR) + "/" + name;
}

// ---- crt ----------------------------------------------------------------

int cmd_crt(const std::string& path) {
    std::ifstream in(path);
    if (!in.good())
        throw Error("cannot open residue file: " + path);
    auto residues = parse_residue_lines(in);
    Residue combined = crt_combine(residues);
    std::cout << format_residue(combined) << "\n";
    return 0;
}

// ---- lift ---------------------------------------------------------------

int cmd_lift(const Int& N, const Int& r, const std::string& lifter, bool as_json,
             int verbosity) {
    if (lifter == "farey") {
        auto value = farey_preimage(N, r);
        if (as_json) {
            json out;
            out["value"] = value ? json(value->to_string()) : json(nullptr);
            if (value) {
                out["cofactor"] = "1";
                out["bad_factors"] = json::array();
            }
            std::cout << out.dump() << "\n";
        } else if (value) {
            std::cout << value->to_string() << " cofactor 1 bad-factors []\n";
        } else {
            std::cout << "NONE\n";
        }
        return 0;
    }

    LiftResult result = error_tolerant_lift(N, r);
    if (verbosity > 0) {
        GaussReduction red = gaussian_reduce({N, Int(0)}, {r, Int(1)});
        for (const auto& v : red.trace)
            std::cerr << "trace " << v.to_string() << "\n";
        std::cerr << "shortest " << red.shortest.to_string() << "\n";
    }
    if (!result.value) {
        if (as_json)
            std::cout << json{{"value", nullptr}}.dump() << "\n";
        else
            std::cout << "NONE\n";
        return 0;
    }
    FactorScan scan = diagnose_bad_factors(result, N);
    if (as_json) {
        json bad = json::array();
        for (const auto& f : scan.factors)
            bad.push_back(f.get_str());
        std::cout << json{{"value", result.value->to_string()},
                          {"cofactor", result.cofactor.get_str()},
                          {"bad_factors", bad}}.dump()
                  << "\n";
    } else {
        std::cout << result.value->to_string() << " cofactor "
                  << result.cofactor.get_str() << " bad-factors "
                  << int_list(scan.factors) << "\n";
    }
    return 0;
}

// ---- reconstruct ----------------------------------------------------------

struct ReconstructArgs {
    std::string target;
    std::vector<std::string> corrupt;
    std::vector<std::string> reject;
    std::string lifter = "errtol";
    unsigned max_primes = 64;
    unsigned stride = 1;
    std::string height;
    std::string budget = "1";
    long start = 2;
    bool random = false;
    std::uint64_t seed = 0;
};

int cmd_reconstruct(const ReconstructArgs& args, bool as_json, int verbosity) {
    auto target = Rational::parse(args.target);
    if (!target)
        throw Error("cannot parse --target as a rational: " + args.target);

    std::map<Int, Int> overrides;
    for (const auto& spec : args.corrupt) {
        auto eq = spec.find('=');
        if (eq == std::string::npos)
            throw Error("--corrupt expects p=s, got: " + spec);
        overrides.emplace(Int(spec.substr(0, eq)), Int(spec.substr(eq + 1)));
    }
    std::set<Int> rejects;
    for (const auto& p : args.reject)
        rejects.insert(Int(p));

    ModularOracle oracle = image_oracle(*target, overrides, rejects);
    TerminationPolicy policy;
    if (!args.height.empty()) {
        policy = height_policy(Int(args.height), args.max_primes, Int(args.budget));
    } else {
        Rational x = *target;
        policy = verify_policy(
            [x](const Rational& y) { return verify_callback_equality(y, x); },
            args.max_primes);
    }
    policy.lift_stride = args.stride;

    PrimeStreamConfig stream_cfg;
    if (args.random) {
        stream_cfg.mode = PrimeStreamConfig::Mode::random;
        stream_cfg.seed = args.seed;
    } else {
        stream_cfg.start = args.start;
    }
    PrimeStream primes(stream_cfg);
    Lifter lifter = (args.lifter == "farey") ? Lifter::farey : Lifter::error_tolerant;

    auto report = reconstruct_rational(oracle, policy, primes, lifter);
    if (verbosity > 0) {
        std::cerr << "primes tried: " << report.primes_tried << "\n";
        std::cerr << "rejected: " << int_list(report.rejected) << "\n";
        std::cerr << "lift failures: " << report.lift_failures << "\n";
        std::cerr << "modulus: " << report.modulus.get_str() << "\n";
    }
    if (as_json) {
        json rejected = json::array();
        for (const auto& p : report.rejected)
            rejected.push_back(p.get_str());
        std::cout << json{{"success", report.success},
                          {"value", report.success ? json(report.value.to_string())
                                                   : json(nullptr)},
                          {"primes_tried", report.primes_tried},
                          {"rejected", rejected},
                          {"lift_failures", report.lift_failures},
                          {"modulus", report.modulus.get_str()}}.dump()
                  << "\n";
    } else if (report.success) {
        std::cout << report.value.to_string() << "\n";
    }
    if (!report.success) {
        std::cerr << "reconstruction did not terminate within " << args.max_primes
                  << " primes\n";
        return 1;
    }
    return 0;
}

// ---- gb -------------------------------------------------------------------

struct GbArgs {
    std::string path;
    bool direct = false;
    bool cleared = false;
    unsigned batch = 4;
    unsigned max_rounds = 16;
    std::uint64_t seed = 0;
    long sequential_start = 0; // 0: random primes
};

int cmd_gb(const GbArgs& args, bool as_json, int /*verbosity*/) {
    std::ifstream in(args.path);
    if (!in.good())
        throw Error("cannot open ideal file: " + args.path);
    IdealFile ideal = parse_ideal_file(in);

    auto print_basis = [&](const GroebnerBasisQ& basis) {
        json lines = json::array();
        for (const auto& g : basis.elements) {
            PolyQ shown = args.cleared ? clear_denominators(g) : g;
            if (as_json)
                lines.push_back(shown.to_string());
            else
                std::cout << shown.to_string() << "\n";
        }
        return lines;
    };

    if (args.direct) {
        GroebnerBasisQ basis = buchberger(ideal.generators);
        json lines = print_basis(basis);
        if (as_json)
            std::cout << json{{"basis", lines}}.dump() << "\n";
        return 0;
    }

    ModularJob job = make_groebner_job(ideal.ctx, ideal.generators);
    RunConfig cfg;
    cfg.batch = args.batch;
    cfg.max_rounds = args.max_rounds;
    cfg.seed = args.seed;
    if (args.sequential_start > 0) {
        cfg.primes.mode = PrimeStreamConfig::Mode::sequential;
        cfg.primes.start = args.sequential_start;
    }
    try {
        RunResult result = run_job(job, cfg);
        json lines = print_basis(result.basis);
        if (as_json)
            std::cout << json{{"basis", lines},
                              {"report", report_to_json(result.report)}}.dump()
                      << "\n";
        else
            std::cerr << result.report.to_text();
        return 0;
    } catch (const MaxRoundsError& e) {
        if (as_json)
            std::cout << json{{"basis", nullptr},
                              {"report", report_to_json(e.report)}}.dump()
                      << "\n";
        else
            std::cerr << e.report.to_text();
        std::cerr << e.what() << "\n";
        return 1;
    }
}

// ---- demo -----------------------------------------------------------------

int demo_farey_26() {
    const Int N(26);
    std::set<Int> image, cn;
    std::set<std::string> psi_values;
    for (Int r = 0; r < N; ++r) {
        if (farey_preimage(N, r))
            image.insert(r);
        LiftResult lift = error_tolerant_lift(N, r);
        if (lift.value) {
            cn.insert(r);
            psi_values.insert(lift.value->to_string());
        }
        if (lift.value.has_value() != cn_membership(N, r))
            return 1;
    }
    std::set<Int> expected_image = {Int(0), Int(1), Int(2), Int(3), Int(8), Int(9),
                                    Int(17), Int(18), Int(23), Int(24), Int(25)};
    std::set<Int> expected_cn;
    for (Int r = 0; r < N; ++r)
        if (r != 5 && r != 21)
            expected_cn.insert(r);
    std::set<std::string> expected_psi;
    for (const char* v : {"0", "1", "-1", "2", "-2", "3", "-3", "4", "-4",
                          "1/2", "-1/2", "1/3", "-1/3", "2/3", "-2/3",
                          "4/3", "-4/3"})
        expected_psi.insert(v);

    std::set<Int> complement;
    for (Int r = 0; r < N; ++r)
        if (!cn.count(r))
            complement.insert(r);

    auto print_set = [](const char* label, const std::set<Int>& xs) {
        std::cout << label;
        for (const auto& x : xs)
            std::cout << " " << x.get_str();
        std::cout << "\n";
    };
    print_set("im(phi):", image);
    print_set("C_N:", cn);
    print_set("C_N complement:", complement);
    std::cout << "psi image:";
    for (const auto& v : psi_values)
        std::cout << " " << v;
    std::cout << "\n";

    return (image == expected_image && cn == expected_cn &&
            psi_values == expected_psi) ? 0 : 1;
}

int demo_bad_primes_38885() {
    const Int N(38885);
    bool ok = true;
    auto show = [&](const Int& r) {
        GaussReduction red = gaussian_reduce({N, Int(0)}, {r, Int(1)});
        std::cout << "r = " << r.get_str() << ":";
        for (const auto& v : red.trace)
            std::cout << " " << v.to_string();
        std::cout << "\n";
        return red;
    };
    auto g1 = show(Int(22684));
    ok &= g1.shortest == LatticeVector{Int(-13), Int(-12)};
    auto g2 = show(Int(16524));
    ok &= g2.shortest == LatticeVector{Int(-85), Int(40)};
    auto g3 = show(Int(464));
    ok &= g3.shortest == LatticeVector{Int(-91), Int(-84)};

    ok &= farey_preimage(N, Int(22684)) == Rational(13, 12);
    ok &= !farey_preimage(N, Int(16524)).has_value();
    ok &= !farey_preimage(N, Int(464)).has_value();

    LiftResult lift = error_tolerant_lift(N, Int(464));
    ok &= lift.value == Rational(13, 12) && lift.cofactor == 7;
    FactorScan scan = diagnose_bad_factors(lift, N);
    ok &= scan.factors.size() == 1 && scan.factors[0] == 7;
    std::cout << "lift(464) = " << lift.value->to_string() << " cofactor "
              << lift.cofactor.get_str() << " bad-factors " << int_list(scan.factors)
              << "\n";

    LiftResult wrong = error_tolerant_lift(N, Int(16524));
    ok &= wrong.value == Rational(-17, 8) && wrong.cofactor == 5;
    return ok ? 0 : 1;
}

int demo_arnold_unlucky(std::uint64_t seed) {
    std::ifstream in(data_file("arnold_j.ideal"));
    if (!in.good())
        throw Error("cannot open data/arnold_j.ideal");
    IdealFile ideal = parse_ideal_file(in);
    ModularJob job = make_groebner_job(ideal.ctx, ideal.generators);
    RunConfig cfg;
    cfg.batch = 6;
    cfg.max_rounds = 24;
    cfg.seed = seed;
    RunResult result = run_job(job, cfg);
    const char* expected[] = {
        "40754032969602177507873137664624218564815033875",
        "12103947791971846719838321886393392913750065060875",
        "264627",
    };
    if (result.basis.elements.size() != 3)
        return 1;
    bool ok = true;
    for (std::size_t i = 0; i < 3; ++i) {
        PolyQ cleared = clear_denominators(result.basis.elements[i]);
        std::string lead = cleared.leading_coeff().to_string();
        std::cout << "lead[" << i << "] = " << lead << "\n";
        ok &= lead == expected[i];
    }
    std::cout << "rounds: " << result.report.rounds << "\n";
    return ok ? 0 : 1;
}

int demo_type5_sextic() {
    std::ifstream in(data_file("type5_sextic.fixture"));
    if (!in.good())
        throw Error("cannot open data/type5_sextic.fixture");
    ModularJob job = load_fixture_job(in);
    RunConfig cfg;
    cfg.primes.mode = PrimeStreamConfig::Mode::sequential;
    cfg.primes.start = 5; // the first batch is exactly {5, 7, 11, 13}
    RunResult result = run_job(job, cfg);
    GroebnerBasisQ target = buchberger(job.generators);
    bool ok = result.basis == target;
    for (const auto& g : result.basis.elements)
        std::cout << g.to_string() << "\n";
    bool suspected = false;
    for (const auto& line : result.report.primes)
        if (line.prime == 5 && line.status == BadPrimeType::type5_suspected)
            suspected = true;
    std::cout << result.report.to_text();
    return (ok && suspected) ? 0 : 1;
}

int cmd_demo(const std::string& name, std::uint64_t seed) {
    int rc = 1;
    if (name == "farey-26")
        rc = demo_farey_26();
    else if (name == "bad-primes-38885")
        rc = demo_bad_primes_38885();
    else if (name == "arnold-unlucky")
        rc = demo_arnold_unlucky(seed);
    else if (name == "type5-sextic")
        rc = demo_type5_sextic();
    else
        throw Error("unknown demo: " + name +
                    " (expected farey-26, bad-primes-38885, arnold-unlucky,"
                    " type5-sextic)");
    std::cout << (rc == 0 ? "PASS" : "FAIL") << "\n";
    return rc;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"error tolerant rational reconstruction and modular Groebner"
                 " basis framework"};
    app.require_subcommand(1);
    app.fallthrough();
    int verbosity = 0;
    app.add_flag("-v", verbosity, "increase verbosity (stderr)");

    // crt
    auto* crt = app.add_subcommand("crt", "combine a residue file by Chinese"
                                          " remaindering");
    std::string crt_path;
    crt->add_option("file", crt_path, "file of '<value> <modulus>' lines")->required();

    // lift
    auto* lift = app.add_subcommand("lift", "lift a residue to a rational");
    std::string lift_n, lift_r, lifter = "errtol";
    bool lift_json = false, flag_farey = false, flag_errtol = false;
    lift->add_option("N", lift_n, "modulus")->required();
    lift->add_option("r", lift_r, "residue, 0 <= r < N")->required();
    lift->add_option("--lifter", lifter, "farey|errtol (default errtol)")
        ->check(CLI::IsMember({"farey", "errtol"}));
    lift->add_flag("--farey", flag_farey, "shorthand for --lifter farey");
    lift->add_flag("--errtol", flag_errtol, "shorthand for --lifter errtol");
    lift->add_flag("--json", lift_json, "emit JSON on stdout");

    // reconstruct
    auto* rec = app.add_subcommand("reconstruct", "drive the full rational"
                                                  " reconstruction loop");
    ReconstructArgs rec_args;
    bool rec_json = false;
    rec->add_option("--target", rec_args.target, "rational to reconstruct (a/b)")
        ->required();
    rec->add_option("--corrupt", rec_args.corrupt,
                    "p=s: force the oracle to answer s at prime p (repeatable)");
    rec->add_option("--reject", rec_args.reject,
                    "prime the oracle rejects (repeatable)");
    rec->add_option("--lifter", rec_args.lifter, "farey|errtol (default errtol)")
        ->check(CLI::IsMember({"farey", "errtol"}));
    rec->add_option("--max-primes", rec_args.max_primes, "prime budget (default 64)");
    rec->add_option("--stride", rec_args.stride, "lift every k-th accepted prime");
    rec->add_option("--height-bound", rec_args.height,
                    "accept by height bound instead of the equality verifier");
    rec->add_option("--budget", rec_args.budget,
                    "assumed bad-prime product for the height rule (default 1)");
    rec->add_option("--start", rec_args.start, "first sequential prime (default 2)");
    rec->add_flag("--random", rec_args.random, "draw random 28-31 bit primes");
    rec->add_option("--seed", rec_args.seed, "seed for --random (default 0)");
    rec->add_flag("--json", rec_json, "emit JSON on stdout");

    // gb
    auto* gb = app.add_subcommand("gb", "reconstruct the reduced Groebner basis"
                                        " of an ideal file");
    GbArgs gb_args;
    bool gb_json = false;
    gb->add_option("file", gb_args.path, "ideal file (vars:/order:/polynomials)")
        ->required();
    gb->add_flag("--direct", gb_args.direct, "Buchberger over Q, no modular loop");
    gb->add_flag("--cleared", gb_args.cleared,
                 "print integer-coprime denominator-cleared elements");
    gb->add_option("--batch", gb_args.batch, "primes per round (default 4)");
    gb->add_option("--max-rounds", gb_args.max_rounds, "round budget (default 16)");
    gb->add_option("--seed", gb_args.seed, "prime-selection seed (default 0)");
    gb->add_option("--sequential-start", gb_args.sequential_start,
                   "use sequential primes from this value instead of random ones");
    gb->add_flag("--json", gb_json, "emit JSON on stdout");

    // demo
    auto* demo = app.add_subcommand("demo", "scripted reproduction of the worked"
                                            " examples");
    std::string demo_name;
    std::uint64_t demo_seed = 0;
    demo->add_option("name", demo_name,
                     "farey-26 | bad-primes-38885 | arnold-unlucky | type5-sextic")
        ->required();
    demo->add_option("--seed", demo_seed, "seed for randomized demos (default 0)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (crt->parsed())
            return cmd_crt(crt_path);
        if (lift->parsed()) {
            if (flag_farey && flag_errtol)
                throw Error("choose one of --farey / --errtol");
            if (flag_farey)
                lifter = "farey";
            if (flag_errtol)
                lifter = "errtol";
            Int N(lift_n), r(lift_r);
            return cmd_lift(N, r, lifter, lift_json, verbosity);
        }
        if (rec->parsed())
            return cmd_reconstruct(rec_args, rec_json, verbosity);
        if (gb->parsed())
            return cmd_gb(gb_args, gb_json, verbosity);
        if (demo->parsed())
            return cmd_demo(demo_name, demo_seed);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: invalid integer argument (" << e.what() << ")\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
