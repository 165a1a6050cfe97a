//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::Instant;

use num_rational::BigRational;
use psigma::character::Character;
use psigma::homology::DEFAULT_FACE_BUDGET;
use psigma::idealedge::{build_complex, Filter};
use psigma::verify::{self, FoundationParams, Mode, VerificationReport};

type Outcome = Result<String, String>;

fn require(report: &VerificationReport, claims: &[&str]) -> Result<(), String> {
    for claim in claims {
        match report.case(claim) {
            Some(c) if c.pass => {}
            Some(c) => return Err(format!("{}: {} = {}", report.command, c.claim, c.computed)),
            None => return Err(format!("{}: missing case {claim:?}", report.command)),
        }
    }
    Ok(())
}

fn all_pass(report: &VerificationReport) -> Result<(), String> {
    match report.failed_cases().next() {
        None => Ok(()),
        Some(c) => Err(format!("{}: {} = {}", report.command, c.claim, c.computed)),
    }
}

fn criterion1() -> Outcome {
    let c = build_complex(3, Filter::All).map_err(|e| e.to_string())?;
    let hubs: Vec<usize> = (0..c.vertex_count()).filter(|&v| c.edges[v].is_hub()).collect();
    let depots: Vec<usize> = (0..c.vertex_count()).filter(|&v| !c.edges[v].is_hub()).collect();
    let ok = c.vertex_count() == 18
        && hubs.len() == 6
        && depots.len() == 12
        && hubs.iter().all(|&v| c.degree(v) == 6)
        && depots.iter().all(|&v| c.degree(v) == 4);
    let msg = format!("{} vertices, {} depots, {} hubs", c.vertex_count(), depots.len(), hubs.len());
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion2() -> Outcome {
    let mut tops = Vec::new();
    for n in 2..=4usize {
        let r = verify::verify_prop47(n, DEFAULT_FACE_BUDGET).map_err(|e| e.to_string())?;
        all_pass(&r)?;
        let mut claims = vec![format!("H̃_{} ≠ 0", n - 2), "negative complex has the same reduced homology".into()];
        if n >= 3 {
            claims.push(format!("H̃_k = 0 for k ≤ {}", n - 3));
            claims.push("complex is connected".into());
        }
        if n == 3 {
            claims.push("rank of H̃_1 is 4".into());
        }
        require(&r, &claims.iter().map(String::as_str).collect::<Vec<_>>())?;

        // the all-(-1) character, built directly rather than by flipping sides
        let neg = Character::from_integers(n, |_, _| -1);
        let c = build_complex(n, Filter::Ascending(&neg)).map_err(|e| e.to_string())?;
        let h = c.complex.reduced_homology().map_err(|e| e.to_string())?;
        let p = h.acyclicity_profile(n as i64 - 3);
        if !p.acyclic_through_m || p.first_nonzero != Some(n as i64 - 2) {
            return Err(format!("n={n} negative character: {}", h.summary()));
        }
        if n == 3 && h.betti(1) != 4 {
            return Err(format!("n=3 negative character: {}", h.summary()));
        }
        tops.push(format!("n={n}: {}", h.summary()));
    }
    Ok(tops.join("; "))
}

fn criterion3() -> Outcome {
    let claims = [
        "every case: 9 vertices, connected, at least as many edges as vertices",
        "every ascending hub has degree at least 3",
        "two ascending hubs share at most two ascending depots",
    ];
    let ex = verify::verify_thm_n3(Mode::Exhaustive, 0, 7).map_err(|e| e.to_string())?;
    require(&ex, &claims)?;
    all_pass(&ex)?;
    let rnd = verify::verify_thm_n3(Mode::Random, 1000, 7).map_err(|e| e.to_string())?;
    require(&rnd, &claims)?;
    all_pass(&rnd)?;
    Ok("216/216 sign patterns, 1000/1000 random characters (seed 7)".into())
}

fn criterion4() -> Outcome {
    let eps = BigRational::new(1.into(), 100.into());
    let r = verify::verify_remark48(&eps, DEFAULT_FACE_BUDGET).map_err(|e| e.to_string())?;
    require(&r, &["perturbed character is generic", "H̃_2 ≠ 0"])?;
    all_pass(&r)?;
    Ok(format!("ε = 1/100: {}", r.info.get("summary").map(|v| v.to_string()).unwrap_or_default()))
}

fn foundations() -> Result<VerificationReport, String> {
    let p = FoundationParams::new(4, 500, 7);
    assert!(p.graphs >= 50 && p.max_vertices <= 8);
    assert!(p.generic_characters >= 100 && p.oracle_characters >= 100 && p.blowup_characters >= 50);
    verify::verify_foundations(p).map_err(|e| e.to_string())
}

fn criterion5(f: &VerificationReport) -> Outcome {
    require(f, &["forest complex of every corpus graph has the homology of S^{V-2}"])?;
    Ok("50 corpus graphs, V ≤ 8".into())
}

fn criterion6(f: &VerificationReport) -> Outcome {
    require(
        f,
        &[
            "positive characters: the reference tree is the unique maximum",
            "generic characters: the maximal-height tree is unique",
            "decisive cases: the ascending forest complex is acyclic",
        ],
    )?;
    Ok("50 graphs × (10 positive + 100 generic) characters".into())
}

fn criterion7(f: &VerificationReport) -> Outcome {
    require(
        f,
        &[
            "McCool relations hold",
            "χ_{i,j}(α_{k,l}) is the Kronecker delta",
            "χ_{i,j}(αβ) = χ_{i,j}(α) + χ_{i,j}(β)",
            "χ of the marking equals the tree height",
            "blow-ups: ascending exactly when the blown-up graph is higher",
        ],
    )?;
    Ok("McCool n=3,4,5; δ; 500 pairs; 50 graphs × 100 characters; blow-ups n ≤ 4 × 50".into())
}

fn criterion8(f: &VerificationReport) -> Outcome {
    require(f, &["Σ¹ predicate spot checks"])?;
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(8);
    let checks = verify::sigma1_checks(&mut rng).map_err(|e| e.to_string())?;
    match checks.iter().find(|(_, ok)| !**ok) {
        Some((name, _)) => Err(name.clone()),
        None => Ok(format!("{} checks", checks.len())),
    }
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut line = |k: usize, start: Instant, outcome: Outcome| {
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {k}: PASS ({secs:.1}s) {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {k}: FAIL ({secs:.1}s) {msg}");
            }
        }
    };
    let t = Instant::now();
    line(1, t, criterion1());
    let t = Instant::now();
    line(2, t, criterion2());
    let t = Instant::now();
    line(3, t, criterion3());
    let t = Instant::now();
    line(4, t, criterion4());
    let t = Instant::now();
    match foundations() {
        Ok(f) => {
            let ran = t.elapsed();
            println!("foundations suite: {:.1}s", ran.as_secs_f64());
            for (k, check) in [(5, criterion5 as fn(&_) -> Outcome), (6, criterion6), (7, criterion7), (8, criterion8)] {
                line(k, Instant::now(), check(&f));
            }
        }
        Err(e) => {
            for k in 5..=8 {
                line(k, t, Err(e.clone()));
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all 8 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
