#pragma once

// Command-line front end. Exit codes:
//   0 success, 1 usage, 2 parse/validation, 3 not authorized, 4 I/O,
//   5 integrity/authentication failure.

#include <chrono>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <type_traits>

#include "CLI11.hpp"
#include "aprabe/complexity.hpp"
#include "aprabe/io.hpp"
#include "aprabe/store.hpp"

namespace aprabe::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kInvalid = 2, kNotAuthorized = 3, kIoFailure = 4, kIntegrity = 5 };

// Attribute universe used by the `demo` command.
inline constexpr std::string_view kEhrMatrixJson =
    R"({"levels":[["HospA","HospB","Prof","Yrs5"],["Cardio","Gastro","∅","∅"]]})";

struct Options {
    std::optional<std::uint64_t> seed;
    std::string backend = "debug";
    std::size_t bits = 0;  // 0 selects the backend default
    std::string matrix, pk, msk, key, in, out, policy, attrs, report, file;
    std::vector<std::string> extend;
    std::size_t levels = 3;
    std::size_t rows = 4;
};

namespace detail {

inline Rng make_rng(const Options& o) { return o.seed ? Rng::from_seed(*o.seed) : Rng::from_os(); }

inline std::size_t prime_bits(const Options& o, Backend b) {
    if (o.bits != 0) return o.bits;
    return b == Backend::Debug ? kDefaultDebugPrimeBits : kDefaultCurvePrimeBits;
}

template <class Fn>
decltype(auto) dispatch(Backend b, Fn&& fn) {
    if (b == Backend::Debug) return std::forward<Fn>(fn)(std::type_identity<DebugGroup>{});
    return std::forward<Fn>(fn)(std::type_identity<CurveGroup>{});
}

inline Backend backend_of_file(std::span<const std::uint8_t> data) { return read_header(data).backend; }

// "ROW=SUFFIX", ROW 1-based.
inline ChildSpec parse_extensions(const std::vector<std::string>& items) {
    ChildSpec spec;
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
            throw ParseError("--extend expects ROW=SUFFIX, got '" + item + "'");
        std::size_t row = 0;
        try {
            std::size_t used = 0;
            row = std::stoul(item.substr(0, eq), &used);
            if (used != eq) throw std::invalid_argument("row");
        } catch (const std::exception&) {
            throw ParseError("--extend row must be a positive integer, got '" + item.substr(0, eq) + "'");
        }
        if (row == 0) throw ParseError("--extend rows are numbered from 1");
        spec.assignments.push_back({row - 1, item.substr(eq + 1)});
    }
    return spec;
}

inline std::string short_hex(const Digest& d) { return to_hex(d).substr(0, 16); }

inline std::string describe_structure(const AccessStructure& s) {
    std::ostringstream os;
    if (const auto* c = std::get_if<CompiledOrigin>(&s.origin()))
        os << "policy " << c->policy;
    else
        os << "delegated from " << short_hex(std::get<DelegatedOrigin>(s.origin()).parent);
    os << "\n  rows:";
    for (std::size_t i = 0; i < s.rows(); ++i) os << "\n    " << (i + 1) << ": " << s.rho(i).to_string();
    return os.str();
}

// --- commands ---------------------------------------------------------------

inline int cmd_setup(const Options& o, std::ostream& out) {
    const auto matrix = std::make_shared<const AttributeMatrix>(AttributeMatrix::from_json(read_text_file(o.matrix)));
    const Backend backend = backend_from_name(o.backend);
    Rng rng = make_rng(o);
    const auto params = gen_params(prime_bits(o, backend), backend, rng);
    return with_group(params, [&](auto grp) {
        auto [pk, msk] = setup(matrix, grp, rng);
        const Bytes pk_bytes = save_public_key(pk);
        const Bytes msk_bytes = save_master_key(msk, binding_of(pk));
        write_file_atomic(o.pk, pk_bytes);
        try {
            write_file_atomic(o.msk, msk_bytes);
        } catch (...) {
            std::filesystem::remove(o.pk);
            throw;
        }
        out << "setup: " << backend_name(backend) << " backend, N has " << bit_length(params.n()) << " bits, L="
            << matrix->levels() << ", D=" << matrix->columns() << "\n";
        return kOk;
    });
}

inline int cmd_keygen(const Options& o, std::ostream& out) {
    const Bytes pk_bytes = read_file(o.pk);
    const Bytes msk_bytes = read_file(o.msk);
    return dispatch(backend_of_file(pk_bytes), [&]<class G>(std::type_identity<G>) {
        const auto pk = load_public_key<G>(pk_bytes);
        const auto msk = load_master_key(msk_bytes);
        require_compatible(pk, msk.binding);
        const auto structure = compile(parse_policy(o.policy, *pk.matrix), pk.group.ring());
        Rng rng = make_rng(o);
        const auto sk = keygen(pk, msk.value, structure, rng);
        write_file_atomic(o.out, save_secret_key(sk, pk.group, binding_of(pk)));
        out << "keygen: " << structure.rows() << " rows, depth " << structure.depth() << "\n";
        return kOk;
    });
}

inline int cmd_delegate(const Options& o, std::ostream& out) {
    const ChildSpec spec = parse_extensions(o.extend);
    const Bytes pk_bytes = read_file(o.pk);
    const Bytes key_bytes = read_file(o.key);
    return dispatch(backend_of_file(pk_bytes), [&]<class G>(std::type_identity<G>) {
        const auto pk = load_public_key<G>(pk_bytes);
        const auto parent = load_secret_key<G>(key_bytes);
        require_compatible(pk, parent.binding);
        Rng rng = make_rng(o);
        const auto child = delegate(pk, parent.value, spec, rng);
        write_file_atomic(o.out, save_secret_key(child, pk.group, binding_of(pk)));
        out << "delegate: " << child.structure.rows() << " rows, depth " << child.depth() << "\n";
        return kOk;
    });
}

inline int cmd_encrypt(const Options& o, std::ostream& out) {
    const Bytes pk_bytes = read_file(o.pk);
    const Bytes payload = read_file(o.in);
    return dispatch(backend_of_file(pk_bytes), [&]<class G>(std::type_identity<G>) {
        const auto pk = load_public_key<G>(pk_bytes);
        const auto set = parse_attribute_set(o.attrs, *pk.matrix);
        Rng rng = make_rng(o);
        auto [ct, blob] = kem_encrypt(pk, set, payload, rng);
        write_file_atomic(o.out, save_ciphertext(ct, pk.group, binding_of(pk), blob));
        out << "encrypt: " << payload.size() << " bytes under " << set.to_string() << "\n";
        return kOk;
    });
}

inline int cmd_decrypt(const Options& o, std::ostream& out) {
    const Bytes pk_bytes = read_file(o.pk);
    const Bytes key_bytes = read_file(o.key);
    const Bytes ct_bytes = read_file(o.in);
    return dispatch(backend_of_file(pk_bytes), [&]<class G>(std::type_identity<G>) {
        const auto pk = load_public_key<G>(pk_bytes);
        const auto sk = load_secret_key<G>(key_bytes);
        const auto ct = load_ciphertext<G>(ct_bytes);
        require_compatible(pk, sk.binding);
        require_compatible(pk, ct.binding);
        const Bytes plain = kem_decrypt(pk, sk.value, ct.value.ct, ct.value.payload);
        write_file_atomic(o.out, plain);
        out << "decrypt: " << plain.size() << " bytes\n";
        return kOk;
    });
}

inline int cmd_inspect(const Options& o, std::ostream& out) {
    const Bytes data = read_file(o.file);
    const ArtifactHeader h = read_header(data);
    out << "kind: " << kind_name(h.kind) << "\nbackend: " << backend_name(h.backend)
        << "\nformat version: " << int{kFormatVersion} << "\nsize: " << data.size() << " bytes\n";
    auto print_binding = [&](const Binding& b) {
        out << "matrix fingerprint: " << to_hex(b.fingerprint) << "\nmodulus: " << bit_length(b.params.n())
            << " bits\n";
        if (b.params.backend == Backend::Curve) out << "field prime q: " << bit_length(b.params.q) << " bits\n";
    };
    if (h.kind == ArtifactKind::Params) {
        const auto p = load_params(data);
        out << "modulus: " << bit_length(p.n()) << " bits\n";
        return kOk;
    }
    if (h.kind == ArtifactKind::MasterKey) {
        print_binding(load_master_key(data).binding);
        return kOk;
    }
    return dispatch(h.backend, [&]<class G>(std::type_identity<G>) {
        switch (h.kind) {
            case ArtifactKind::PublicKey: {
                const auto pk = load_public_key<G>(data);
                print_binding(binding_of(pk));
                out << "levels L: " << pk.levels() << "\ncolumns D: " << pk.columns() << "\n";
                break;
            }
            case ArtifactKind::SecretKey: {
                const auto sk = load_secret_key<G>(data);
                print_binding(sk.binding);
                out << "depth: " << sk.value.depth() << "\n" << describe_structure(sk.value.structure) << "\n";
                break;
            }
            case ArtifactKind::Ciphertext: {
                const auto ct = load_ciphertext<G>(data);
                print_binding(ct.binding);
                out << "attributes: " << ct.value.ct.attributes.to_string()
                    << "\npayload: " << ct.value.payload.size() << " bytes\n";
                break;
            }
            default:
                break;
        }
        return kOk;
    });
}

// Synthetic universe with `levels` levels and enough columns for `rows`
// distinct first-level names: a<level>_<column>.
inline std::shared_ptr<const AttributeMatrix> bench_matrix(std::size_t levels, std::size_t rows) {
    std::vector<std::vector<std::string>> grid(levels, std::vector<std::string>(std::max<std::size_t>(rows, 2)));
    for (std::size_t i = 0; i < levels; ++i)
        for (std::size_t j = 0; j < grid[i].size(); ++j)
            grid[i][j] = "a" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
    return std::make_shared<const AttributeMatrix>(AttributeMatrix::from_levels(std::move(grid)));
}

// AND of `rows` leaves at the given depth: [a1_j, a2_1, ..., ak_1].
inline PolicyFormula bench_policy(const AttributeMatrix& m, std::size_t depth, std::size_t rows) {
    auto leaf = [&](std::size_t j) {
        std::vector<std::string> names{m.name(1, j)};
        for (std::size_t level = 2; level <= depth; ++level) names.push_back(m.name(level, 1));
        return PolicyFormula::leaf(make_vector(m, names));
    };
    PolicyFormula f = leaf(1);
    for (std::size_t j = 2; j <= rows; ++j) f = PolicyFormula::both(f, leaf(j));
    return f;
}

struct BenchRow {
    std::string operation;
    std::size_t depth;
    std::size_t count;  // l, |S|, l' or l*
    CounterSnapshot measured;
    complexity::Counts expected;
    std::uint64_t table;  // reference value (t_e units, t_p for decrypt)
    double millis;
};

template <BilinearGroup G>
std::vector<BenchRow> run_bench(const G& grp, std::size_t levels, std::size_t rows, Rng& rng) {
    const auto matrix = bench_matrix(levels, rows);
    auto [pk, msk] = setup(matrix, grp, rng);
    std::vector<BenchRow> out;
    auto measure = [&](auto&& op) {
        grp.reset_counters();
        const auto t0 = std::chrono::steady_clock::now();
        auto result = op();
        const auto t1 = std::chrono::steady_clock::now();
        return std::make_tuple(std::move(result), grp.counters(),
                               std::chrono::duration<double, std::milli>(t1 - t0).count());
    };
    for (std::size_t k = 1; k <= levels; ++k) {
        const auto structure = compile(bench_policy(*matrix, k, rows), grp.ring());
        auto [sk, kc, kt] = measure([&] { return keygen(pk, msk, structure, rng); });
        out.push_back({"keygen", k, rows, kc, complexity::keygen(levels, k, rows), complexity::table::keygen(levels, rows), kt});

        const AttributeSet set(structure.labels());
        const auto m = grp.random_gt(rng);
        auto [ct, ec, et] = measure([&] { return encrypt(pk, set, m, rng); });
        out.push_back({"encrypt", k, rows, ec, complexity::encrypt(k, rows), complexity::table::encrypt(k, rows), et});

        auto [plain, dc, dt] = measure([&] { return decrypt(pk, sk, ct); });
        if (!grp.gt_eq(plain, m)) throw Error("bench: decryption returned the wrong message");
        out.push_back({"decrypt", k, rows, dc, complexity::decrypt(rows), complexity::table::decrypt_pairings(rows), dt});

        if (k < levels) {
            ChildSpec spec;
            for (std::size_t i = 0; i < rows; ++i) spec.assignments.push_back({i, matrix->name(k + 1, 1)});
            auto [child, gc, gt] = measure([&] { return delegate(pk, sk, spec, rng); });
            out.push_back({"delegate", k, rows, gc, complexity::delegate(levels, k, rows),
                           complexity::table::delegate(levels, k, rows), gt});
        }
    }
    return out;
}

inline void print_bench(std::ostream& os, const std::vector<BenchRow>& rows, std::size_t levels) {
    os << "| operation | k | rows | G exps | GT exps | pairings | closed form (G/GT/pair) | table | match | ms |\n"
       << "|---|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& r : rows) {
        const bool match = r.measured.exponentiations == r.expected.exponentiations &&
                           r.measured.gt_exponentiations == r.expected.gt_exponentiations &&
                           r.measured.pairings == r.expected.pairings;
        os << "| " << r.operation << " | " << r.depth << " | " << r.count << " | " << r.measured.exponentiations
           << " | " << r.measured.gt_exponentiations << " | " << r.measured.pairings << " | "
           << r.expected.exponentiations << "/" << r.expected.gt_exponentiations << "/" << r.expected.pairings
           << " | " << r.table << " | " << (match ? "yes" : "NO") << " | " << std::fixed << std::setprecision(2)
           << r.millis << " |\n";
    }
    os << "\nL = " << levels
       << ". Table column: (L+3)l for keygen, (k+2)|S|+2 for encrypt (G+GT exps), (2L-k+5)l' for delegate,"
          " 3l* pairings for decrypt.\nKeygen and delegate additionally spend l(L-k+3) and l'(L-k+2)"
          " exponentiations on G3 randomizers, which the table does not charge.\n";
}

inline int cmd_bench(const Options& o, std::ostream& out) {
    if (o.levels < 1 || o.rows < 1) throw ValidationError("--levels and --rows must be positive");
    const Backend backend = backend_from_name(o.backend);
    Rng rng = make_rng(o);
    const auto params = gen_params(prime_bits(o, backend), backend, rng);
    return with_group(params, [&](auto grp) {
        const auto rows = run_bench(grp, o.levels, o.rows, rng);
        std::ostringstream table;
        print_bench(table, rows, o.levels);
        out << table.str();
        if (!o.report.empty()) write_file_atomic(o.report, table.str());
        return kOk;
    });
}

template <BilinearGroup G>
int run_demo(const G& grp, Rng& rng, std::ostream& out) {
    const auto matrix = std::make_shared<const AttributeMatrix>(AttributeMatrix::from_json(kEhrMatrixJson));
    out << "[1] setup: " << backend_name(G::kBackend) << " backend, N has " << bit_length(grp.params().n())
        << " bits; universe " << matrix->to_json() << "\n";
    auto [pk, msk] = setup(matrix, grp, rng);

    const std::string record = "Alice: ECG shows arrhythmia; refer to cardiology.";
    const Bytes payload(record.begin(), record.end());
    const auto general = parse_attribute_set("[HospA];[Prof];[Yrs5]", *matrix);
    const auto special = parse_attribute_set("[HospA,Cardio];[Prof,∅];[Yrs5,∅]", *matrix);
    auto [ct1, blob1] = kem_encrypt(pk, general, payload, rng);
    auto [ct2, blob2] = kem_encrypt(pk, special, payload, rng);
    out << "[2] record encrypted under S1 = {" << general.to_string() << "} and S2 = {" << special.to_string()
        << "}\n";

    const auto policy = parse_policy("[HospA] AND [Prof] AND [Yrs5]", *matrix);
    const auto sk = keygen(pk, msk, compile(policy, grp.ring()), rng);
    out << "[3] Alice issues a key for A = " << policy.to_string() << "\n";

    // Round-trip the key through its file encoding, as a doctor would receive it.
    const auto received = load_secret_key<G>(save_secret_key(sk, grp, binding_of(pk))).value;
    const Bytes first = kem_decrypt(pk, received, ct1, blob1);
    out << "[4] doctor with A reads the S1 record: " << (first == payload ? "decrypt OK" : "MISMATCH") << "\n";
    if (first != payload) return kIntegrity;

    const ChildSpec to_cardio{{{0, "Cardio"}, {1, std::string(kEmptyAttribute)}, {2, std::string(kEmptyAttribute)}}};
    const auto cardio = delegate(pk, received, to_cardio, rng);
    out << "[5] doctor redefines A as A' and delegates:" << "\n  " << describe_structure(cardio.structure) << "\n";

    const ChildSpec to_gastro{{{0, "Gastro"}, {1, std::string(kEmptyAttribute)}, {2, std::string(kEmptyAttribute)}}};
    const auto gastro = delegate(pk, received, to_gastro, rng);
    const bool gastro_denied = !try_decrypt(pk, gastro, ct2).has_value();
    out << "[6] a gastroenterologist delegate on S2: " << (gastro_denied ? "not authorized (expected)" : "DECRYPTED")
        << "\n";
    if (!gastro_denied) return kIntegrity;

    const Bytes second = kem_decrypt(pk, cardio, ct2, blob2);
    const bool ok = second == payload;
    out << "[7] cardiologist with A' reads the S2 record: " << std::string(second.begin(), second.end()) << "\n";
    out << (ok ? "decrypt OK" : "decrypt FAILED") << "\n";
    return ok ? kOk : kIntegrity;
}

inline int cmd_demo(const Options& o, std::ostream& out) {
    const Backend backend = backend_from_name(o.backend);
    Rng rng = make_rng(o);
    const auto params = gen_params(prime_bits(o, backend), backend, rng);
    return with_group(params, [&](auto grp) { return run_demo(grp, rng, out); });
}

}  // namespace detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Attribute-based encryption with policy-redefining key delegation", "aprabe"};
    app.require_subcommand(1);
    Options o;
#ifdef APRABE_ENABLE_SEED_OPTION
    app.add_option("--seed", o.seed, "Deterministic RNG seed (test builds only)");
#endif

    auto* setup_cmd = app.add_subcommand("setup", "Generate group parameters, public key and master key");
    setup_cmd->add_option("--matrix", o.matrix, "Attribute matrix JSON")->required();
    setup_cmd->add_option("--pk", o.pk, "Public key output")->required();
    setup_cmd->add_option("--msk", o.msk, "Master secret key output")->required();
    setup_cmd->add_option("--backend", o.backend, "debug or curve")->check(CLI::IsMember({"debug", "curve"}));
    setup_cmd->add_option("--bits", o.bits, "Bits per prime factor of N");

    auto* keygen_cmd = app.add_subcommand("keygen", "Issue a secret key for a policy");
    keygen_cmd->add_option("--pk", o.pk)->required();
    keygen_cmd->add_option("--msk", o.msk)->required();
    keygen_cmd->add_option("--policy", o.policy, "e.g. \"[HospA] AND ([Prof] OR [Yrs5])\"")->required();
    keygen_cmd->add_option("--out", o.out)->required();

    auto* delegate_cmd = app.add_subcommand("delegate", "Derive a key for a redefined policy one level down");
    delegate_cmd->add_option("--pk", o.pk)->required();
    delegate_cmd->add_option("--key", o.key, "Parent secret key")->required();
    delegate_cmd->add_option("--extend", o.extend, "ROW=SUFFIX, repeatable; rows numbered from 1")->required();
    delegate_cmd->add_option("--out", o.out)->required();

    auto* encrypt_cmd = app.add_subcommand("encrypt", "Encrypt a file under a set of attribute vectors");
    encrypt_cmd->add_option("--pk", o.pk)->required();
    encrypt_cmd->add_option("--attrs", o.attrs, "e.g. \"[HospA,Cardio];[Prof,∅]\"")->required();
    encrypt_cmd->add_option("--in", o.in)->required();
    encrypt_cmd->add_option("--out", o.out)->required();

    auto* decrypt_cmd = app.add_subcommand("decrypt", "Decrypt a file with a secret key");
    decrypt_cmd->add_option("--pk", o.pk)->required();
    decrypt_cmd->add_option("--key", o.key)->required();
    decrypt_cmd->add_option("--in", o.in)->required();
    decrypt_cmd->add_option("--out", o.out)->required();

    auto* bench_cmd = app.add_subcommand("bench", "Count exponentiations and pairings per algorithm");
    bench_cmd->add_option("--levels", o.levels, "Matrix levels L")->capture_default_str();
    bench_cmd->add_option("--rows", o.rows, "Policy rows l (= |S| = l' = l*)")->capture_default_str();
    bench_cmd->add_option("--report", o.report, "Also write the table to this file");
    bench_cmd->add_option("--backend", o.backend)->check(CLI::IsMember({"debug", "curve"}));
    bench_cmd->add_option("--bits", o.bits);

    auto* demo_cmd = app.add_subcommand("demo", "Run the health-record delegation scenario end to end");
    demo_cmd->add_option("--backend", o.backend)->check(CLI::IsMember({"debug", "curve"}));
    demo_cmd->add_option("--bits", o.bits);

    auto* inspect_cmd = app.add_subcommand("inspect", "Print artifact metadata");
    inspect_cmd->add_option("file", o.file)->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*setup_cmd) return detail::cmd_setup(o, out);
        if (*keygen_cmd) return detail::cmd_keygen(o, out);
        if (*delegate_cmd) return detail::cmd_delegate(o, out);
        if (*encrypt_cmd) return detail::cmd_encrypt(o, out);
        if (*decrypt_cmd) return detail::cmd_decrypt(o, out);
        if (*bench_cmd) return detail::cmd_bench(o, out);
        if (*demo_cmd) return detail::cmd_demo(o, out);
        if (*inspect_cmd) return detail::cmd_inspect(o, out);
    } catch (const NotAuthorized& e) {
        err << "not authorized: " << e.what() << "\n";
        return kNotAuthorized;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << "\n";
        return kIoFailure;
    } catch (const IntegrityError& e) {
        err << "integrity failure: " << e.what() << "\n";
        return kIntegrity;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "i/o error: " << e.what() << "\n";
        return kIoFailure;
    }
    return kUsage;
}

inline int run_cli(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    return run_cli(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace aprabe::cli
