use super::EvolutionError;
use crate::rng::RngHandle;
use crate::schemas::{repair, Genotype};

/// Simulated binary crossover on every coordinate, then repair into the box.
pub fn sbx_crossover(
    p1: &Genotype,
    p2: &Genotype,
    eta: f64,
    rng: &mut RngHandle,
) -> Result<(Genotype, Genotype), EvolutionError> {
    if p1.len() != p2.len() {
        return Err(EvolutionError::LengthMismatch {
            expected: p1.len(),
            found: p2.len(),
        });
    }
    let exponent = 1.0 / (eta + 1.0);
    let mut c1 = Vec::with_capacity(p1.len());
    let mut c2 = Vec::with_capacity(p1.len());
    for (&a, &b) in p1.0.iter().zip(&p2.0) {
        let u = rng.uniform();
        if (a - b).abs() < 1e-14 {
            c1.push(a);
            c2.push(b);
            continue;
        }
        let beta = if u <= 0.5 {
            (2.0 * u).powf(exponent)
        } else {
            (1.0 / (2.0 * (1.0 - u))).powf(exponent)
        };
        c1.push(0.5 * ((1.0 + beta) * a + (1.0 - beta) * b));
        c2.push(0.5 * ((1.0 - beta) * a + (1.0 + beta) * b));
    }
    Ok((repair(&Genotype(c1)), repair(&Genotype(c2))))
}

/// Bounded polynomial mutation in the unit box; each gene mutates with
/// probability `per_gene_prob`.
pub fn polynomial_mutation(g: &Genotype, eta: f64, per_gene_prob: f64, rng: &mut RngHandle) -> Genotype {
    let exponent = 1.0 / (eta + 1.0);
    let out = g
        .0
        .iter()
        .map(|&x| {
            if !rng.chance(per_gene_prob) {
                return x;
            }
            let x = x.clamp(0.0, 1.0);
            let u = rng.uniform();
            let delta_q = if u < 0.5 {
                let xy = 1.0 - x;
                let val = 2.0 * u + (1.0 - 2.0 * u) * xy.powf(eta + 1.0);
                val.powf(exponent) - 1.0
            } else {
                let xy = x;
                let val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * xy.powf(eta + 1.0);
                1.0 - val.powf(exponent)
            };
            x + delta_q
        })
        .collect();
    repair(&Genotype(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_substream;

    #[test]
    fn identical_parents_are_a_fixed_point() {
        let p = Genotype(vec![0.1, 0.5, 0.93]);
        let (a, b) = sbx_crossover(&p, &p, 15.0, &mut rng_substream(1, "sbx")).unwrap();
        assert_eq!(a, p);
        assert_eq!(b, p);
    }

    #[test]
    fn length_mismatch() {
        let r = sbx_crossover(&Genotype(vec![0.1]), &Genotype(vec![0.1, 0.2]), 15.0, &mut rng_substream(1, "x"));
        assert!(matches!(r, Err(EvolutionError::LengthMismatch { .. })));
    }

    #[test]
    fn sbx_preserves_parent_mean() {
        let p1 = Genotype(vec![0.3, 0.45]);
        let p2 = Genotype(vec![0.6, 0.55]);
        let mut rng = rng_substream(11, "sbx-mean");
        let trials = 100_000;
        let mut sums = [0.0; 2];
        for _ in 0..trials {
            let (a, b) = sbx_crossover(&p1, &p2, 15.0, &mut rng).unwrap();
            for i in 0..2 {
                sums[i] += a.0[i] + b.0[i];
            }
        }
        for i in 0..2 {
            let child_mean = sums[i] / (2.0 * trials as f64);
            let parent_mean = 0.5 * (p1.0[i] + p2.0[i]);
            assert!((child_mean - parent_mean).abs() < 0.01, "coord {i}: {child_mean} vs {parent_mean}");
        }
    }

    #[test]
    fn huge_eta_keeps_children_on_parents() {
        let p1 = Genotype(vec![0.2, 0.8, 0.5]);
        let p2 = Genotype(vec![0.7, 0.1, 0.4]);
        let mut rng = rng_substream(3, "eta");
        for _ in 0..1000 {
            let (a, b) = sbx_crossover(&p1, &p2, 1e6, &mut rng).unwrap();
            for i in 0..3 {
                assert!((a.0[i] - p1.0[i]).abs() < 1e-3);
                assert!((b.0[i] - p2.0[i]).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn mutation_probability_zero_is_identity() {
        let g = Genotype(vec![0.0, 0.4, 1.0]);
        assert_eq!(polynomial_mutation(&g, 20.0, 0.0, &mut rng_substream(1, "m")), g);
    }

    #[test]
    fn mutation_stays_in_box() {
        let mut rng = rng_substream(8, "box");
        for _ in 0..10_000 {
            let g = Genotype(vec![rng.uniform(), 0.0, 1.0]);
            let m = polynomial_mutation(&g, 2.0, 1.0, &mut rng);
            assert!(m.0.iter().all(|x| (0.0..=1.0).contains(x)));
        }
    }

    #[test]
    fn mutation_displacement_is_moderate() {
        let mut rng = rng_substream(9, "disp");
        let trials = 100_000;
        let mut total = 0.0;
        for _ in 0..trials {
            let x = rng.uniform();
            let m = polynomial_mutation(&Genotype(vec![x]), 20.0, 1.0, &mut rng);
            total += (m.0[0] - x).abs();
        }
        let mean = total / trials as f64;
        assert!(mean > 0.0 && mean < 0.5, "mean displacement {mean}");
    }
}
