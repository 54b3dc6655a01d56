mod common;

use common::{any_enlargement, zero};
use proptest::prelude::*;
use rwval_core::noarb::{find_emms, is_complete, rnp_from_measure};
use rwval_core::probspace::is_immersed;
use rwval_core::random;
use rwval_core::sensitivity::{efficiency_check, sensitivity_report, sensitivity_under};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn report_agrees_with_immersion(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let m = any_enlargement(&mut rng);
        let (e, f) = (m.evolution(), m.ambient());
        let rep = sensitivity_report(&m, f, &zero()).unwrap();
        let imm = is_immersed(e, f, m.probs(), &zero()).unwrap();
        prop_assert_eq!(rep.sensitive(), imm.immersed);
        prop_assert!(rep.consistent());
        if rep.sensitive() {
            prop_assert!(rep.sigma_identity);
        } else {
            prop_assert!(rep.forward_witness.is_some() && rep.reverse_witness.is_some());
        }
    }

    #[test]
    fn complete_with_price_adapted_density_is_sensitive(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let m = any_enlargement(&mut rng);
        let (e, f) = (m.evolution(), m.ambient());
        let set = find_emms(&m, f, &zero()).unwrap();
        prop_assume!(set.has_equivalent());
        let q = set.measure.unwrap();
        let rnp = rnp_from_measure(&q, f, m.probs()).unwrap();
        let adapted = e.check_adapted(&rnp.levels, &zero()).is_ok();
        if adapted && is_complete(&m, &q, &zero()).unwrap().complete {
            prop_assert!(sensitivity_report(&m, f, &zero()).unwrap().sensitive());
        }
    }

    #[test]
    fn sensitivity_passes_to_intermediate_filtrations(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let m = any_enlargement(&mut rng);
        let (e, f) = (m.evolution(), m.ambient());
        prop_assume!(sensitivity_report(&m, f, &zero()).unwrap().sensitive());
        for _ in 0..4 {
            let i = random::random_intermediate(&mut rng, e, f);
            prop_assert!(e.is_subfiltration_of(&i) && i.is_subfiltration_of(f));
            prop_assert!(sensitivity_under(e, &i, m.probs(), &zero()).unwrap().sensitive());
        }
    }

    #[test]
    fn efficiency_ignores_numeraire(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let m = any_enlargement(&mut rng);
        let f = m.ambient();
        let base = efficiency_check(&m, f, &zero()).unwrap();
        for b in 0..m.num_assets() {
            let other = efficiency_check(&m.with_numeraire(b).unwrap(), f, &zero()).unwrap();
            prop_assert_eq!(other.efficient, base.efficient);
            prop_assert_eq!(other.risk_neutral, base.risk_neutral);
        }
    }
}
