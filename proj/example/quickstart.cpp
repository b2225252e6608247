// Issue a key, hand it down one level, and decrypt with the delegated key.
#include <iostream>

#include "aprabe/aprabe.hpp"

int main() {
    using namespace aprabe;
    Rng rng = Rng::from_os();
    const DebugGroup grp(gen_params(kDefaultDebugPrimeBits, Backend::Debug, rng));
    const auto matrix = std::make_shared<const AttributeMatrix>(AttributeMatrix::from_levels(
        {{"HospA", "HospB", "Prof", "Yrs5"}, {"Cardio", "Gastro", "∅", "∅"}}));

    auto [pk, msk] = setup(matrix, grp, rng);
    const auto policy = parse_policy("[HospA] AND [Prof] AND [Yrs5]", *matrix);
    const auto sk = keygen(pk, msk, compile(policy, grp.ring()), rng);

    const ChildSpec spec{{{0, "Cardio"}, {1, "∅"}, {2, "∅"}}};
    const auto cardio = delegate(pk, sk, spec, rng);

    const auto m = grp.random_gt(rng);
    const auto ct = encrypt(pk, parse_attribute_set("[HospA,Cardio];[Prof,∅];[Yrs5,∅]", *matrix), m, rng);
    const bool ok = grp.gt_eq(decrypt(pk, cardio, ct), m);
    std::cout << (ok ? "delegated key decrypts" : "decryption mismatch") << "\n";
    return ok ? 0 : 1;
}
