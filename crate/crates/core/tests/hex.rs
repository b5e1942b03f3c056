use edgemig_core::hex::*;
use proptest::prelude::*;

fn offset(max_ring: u32) -> impl Strategy<Value = HexOffset> {
    (0..state_count(max_ring)).prop_map(HexOffset::from_linear_index)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn axial_round_trip(s in offset(30)) {
        let a = s.to_axial();
        prop_assert_eq!(a.norm(), s.ring);
        prop_assert_eq!(HexOffset::from_axial(a), s);
        prop_assert_eq!(HexOffset::from_linear_index(s.linear_index()), s);
    }

    #[test]
    fn distance_is_a_metric(a in offset(12), b in offset(12), c in offset(12)) {
        prop_assert_eq!(hex_distance(a, a), 0);
        prop_assert_eq!(hex_distance(a, b), hex_distance(b, a));
        prop_assert!(hex_distance(a, c) <= hex_distance(a, b) + hex_distance(b, c));
        prop_assert_eq!(hex_distance(HexOffset::ORIGIN, a), a.ring);
    }

    #[test]
    fn neighbors_are_adjacent(s in offset(15)) {
        let nbs = s.neighbors();
        for (k, nb) in nbs.iter().enumerate() {
            prop_assert_eq!(hex_distance(s, *nb), 1);
            prop_assert!(nb.ring.abs_diff(s.ring) <= 1);
            prop_assert!(!nbs[..k].contains(nb));
        }
    }

    #[test]
    fn nearest_cell_is_nearest(x in -20.0f64..20.0, y in -20.0f64..20.0) {
        let cell = Axial::nearest_to_plane(x, y);
        let dist = |a: Axial| {
            let (px, py) = a.to_plane();
            (px - x).powi(2) + (py - y).powi(2)
        };
        let d0 = dist(cell);
        for nb in cell.neighbors() {
            prop_assert!(d0 <= dist(nb) + 1e-12);
        }
    }
}
