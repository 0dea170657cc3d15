//! Gate-level vs matrix-level equivalence checks for the built circuits.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    build_hdwm_extract_pixel, build_hdwm_pixel, build_majority3, build_qbs, build_qe, build_qib,
    simulate, BasisState, Circuit,
};
use crate::aqsm::qbs_splice;
use crate::error::Result;
use crate::hdwm::{embed_bit, extract_bit, msb_xor_flag, EmbedParams};
use crate::image::BinaryImage;
use crate::pipeline::majority_vote;

/// Outcome of one verification suite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteResult {
    pub name: String,
    pub cases: u64,
    /// First failing case, if any.
    pub counterexample: Option<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

impl fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.counterexample {
            None => write!(f, "PASS {} ({} cases)", self.name, self.cases),
            Some(c) => write!(f, "FAIL {} after {} cases: {c}", self.name, self.cases),
        }
    }
}

struct Suite {
    name: String,
    cases: u64,
    counterexample: Option<String>,
}

impl Suite {
    fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            cases: 0,
            counterexample: None,
        }
    }

    /// Records one case; returns `false` once a counterexample is held.
    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) -> bool {
        self.cases += 1;
        if !ok && self.counterexample.is_none() {
            self.counterexample = Some(describe());
        }
        self.counterexample.is_none()
    }

    fn fail(mut self, msg: String) -> SuiteResult {
        self.counterexample.get_or_insert(msg);
        self.finish()
    }

    fn finish(self) -> SuiteResult {
        SuiteResult {
            name: self.name,
            cases: self.cases,
            counterexample: self.counterexample,
        }
    }
}

fn groups<'a>(c: &'a Circuit, names: &[&str]) -> Result<Vec<&'a [usize]>> {
    names.iter().map(|n| c.group(n)).collect()
}

/// Exhaustive sweep of every input basis state of a QBS circuit with `m`
/// position bits per axis, against [`qbs_splice`] of blocks that hold the
/// state's colors at the state's position.
pub fn verify_qbs_circuit(c: &Circuit, m: u32) -> SuiteResult {
    let mut suite = Suite::new(format!("qbs m={m} exhaustive"));
    let g = match groups(
        c,
        &["y", "x", "ext_y", "ext_x", "color", "out", "select", "flag"],
    ) {
        Ok(g) => g,
        Err(e) => return suite.fail(e.to_string()),
    };
    let (gy, gx, gey, gex, gcol, gout, gsel, gflag) =
        (g[0], g[1], g[2], g[3], g[4], g[5], g[6], g[7]);
    let s = 1usize << m;
    for y in 0..s {
        for x in 0..s {
            for quadrant in 0..4usize {
                for colors in 0..16u64 {
                    let mut st = BasisState::zeros(c.wire_count());
                    st.write(gy, y as u64);
                    st.write(gx, x as u64);
                    st.write(gey, (quadrant >> 1) as u64);
                    st.write(gex, (quadrant & 1) as u64);
                    st.write(gcol, colors);
                    let out = match simulate(c, &st) {
                        Ok(o) => o,
                        Err(e) => return suite.fail(e.to_string()),
                    };
                    let blocks: Vec<BinaryImage> = (0..4)
                        .map(|k| {
                            let mut b = BinaryImage::zeros(m);
                            b.set(y, x, ((colors >> k) & 1) as u8);
                            b
                        })
                        .collect();
                    let spliced = qbs_splice(&blocks).expect("equal blocks");
                    let (yy, xx) = ((quadrant >> 1) * s + y, (quadrant & 1) * s + x);
                    let expect = spliced.get(yy, xx) as u64;
                    let got = out.read(gout);
                    let clean = out.read(gsel) == 0
                        && out.read(gflag) == 0
                        && out.read(gcol) == colors
                        && out.read(gy) == y as u64
                        && out.read(gx) == x as u64;
                    if !suite.check(got == expect && clean, || {
                        format!(
                            "coordinate (Y={yy}, X={xx}) colors={colors:04b}: expected {expect}, got {got}; \
                             wires in={st} out={out}"
                        )
                    }) {
                        return suite.finish();
                    }
                }
            }
        }
    }
    suite.finish()
}

/// Runs a QBS circuit over every coordinate of the spliced image for four
/// concrete blocks and compares with [`qbs_splice`].
pub fn verify_qbs_blocks(c: &Circuit, blocks: &[BinaryImage]) -> SuiteResult {
    let m = blocks[0].side_exp();
    let mut suite = Suite::new(format!("qbs m={m} blocks vs matrix splice"));
    let spliced = match qbs_splice(blocks) {
        Ok(s) => s,
        Err(e) => return suite.fail(e.to_string()),
    };
    let g = match groups(c, &["y", "x", "ext_y", "ext_x", "color", "out"]) {
        Ok(g) => g,
        Err(e) => return suite.fail(e.to_string()),
    };
    let s = 1usize << m;
    for yy in 0..2 * s {
        for xx in 0..2 * s {
            let (y, x) = (yy % s, xx % s);
            let mut st = BasisState::zeros(c.wire_count());
            st.write(g[0], y as u64);
            st.write(g[1], x as u64);
            st.write(g[2], (yy / s) as u64);
            st.write(g[3], (xx / s) as u64);
            let colors = (0..4).fold(0u64, |acc, k| acc | (blocks[k].get(y, x) as u64) << k);
            st.write(g[4], colors);
            let got = match simulate(c, &st) {
                Ok(o) => o.read(g[5]),
                Err(e) => return suite.fail(e.to_string()),
            };
            let expect = spliced.get(yy, xx) as u64;
            if !suite.check(got == expect, || {
                format!("coordinate (Y={yy}, X={xx}): expected {expect}, got {got}; wires in={st}")
            }) {
                return suite.finish();
            }
        }
    }
    suite.finish()
}

pub fn verify_qbs(m: u32, seed: u64) -> Vec<SuiteResult> {
    let c = match build_qbs(m as usize) {
        Ok(c) => c,
        Err(e) => return vec![Suite::new(format!("qbs m={m}")).fail(e.to_string())],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocks: Vec<BinaryImage> = (0..4)
        .map(|_| BinaryImage::from_fn(m, |_, _| rng.gen::<bool>() as u8))
        .collect();
    let same = vec![blocks[0].clone(); 4];
    let mut out = vec![verify_qbs_circuit(&c, m), verify_qbs_blocks(&c, &blocks)];
    let mut equal = verify_qbs_blocks(&c, &same);
    equal.name = format!("qbs m={m} equal blocks");
    out.push(equal);
    out
}

/// All 8 inputs against [`majority_vote`].
pub fn verify_majority3() -> SuiteResult {
    let mut suite = Suite::new("majority3 exhaustive");
    let c = match build_majority3() {
        Ok(c) => c,
        Err(e) => return suite.fail(e.to_string()),
    };
    let (inp, out_w) = (
        c.group("inputs").unwrap().to_vec(),
        c.group("out").unwrap().to_vec(),
    );
    for v in 0..8u64 {
        let mut st = BasisState::zeros(c.wire_count());
        st.write(&inp, v);
        let out = simulate(&c, &st).expect("well-formed");
        let copies: Vec<BinaryImage> = (0..3)
            .map(|i| BinaryImage::new(0, vec![((v >> i) & 1) as u8]).unwrap())
            .collect();
        let refs: Vec<&BinaryImage> = copies.iter().collect();
        let expect = majority_vote(&refs).unwrap().bits()[0] as u64;
        let got = out.read(&out_w);
        if !suite.check(got == expect && out.read(&inp) == v, || {
            format!("inputs={v:03b}: expected {expect}, got {got}")
        }) {
            break;
        }
    }
    suite.finish()
}

/// Parameter configurations of the embedding rule: (tau1, tau2) in
/// {(0, 0), (1, 0), (1, 1)} for each eta.
pub fn hdwm_configs() -> Vec<EmbedParams> {
    let mut out = Vec::new();
    for eta in 0..2 {
        for (tau1, tau2) in [(0, 0), (1, 0), (1, 1)] {
            out.push(EmbedParams {
                lambda: 0.5,
                tau1,
                tau2,
                eta,
            });
        }
    }
    out
}

/// Every (msb, w, lsb) input of the embedding slice against [`embed_bit`],
/// then the extraction slice composed after it against the watermark bit.
pub fn verify_hdwm_pixel(params: &EmbedParams) -> SuiteResult {
    let mut suite = Suite::new(format!(
        "hdwm pixel tau1={} tau2={} eta={}",
        params.tau1, params.tau2, params.eta
    ));
    let (emb, ext) = match (build_hdwm_pixel(params), build_hdwm_extract_pixel(params)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return suite.fail(e.to_string()),
    };
    let g = groups(&emb, &["msb", "w", "lsb", "v"]).unwrap();
    let h = groups(&ext, &["msb", "lsb", "e", "v"]).unwrap();
    for msb in 0..16u64 {
        let pixel = (msb as u8) << 4;
        let v = msb_xor_flag(pixel, params.eta);
        for w in 0..2u64 {
            for lsb in 0..2u64 {
                let mut st = BasisState::zeros(emb.wire_count());
                st.write(g[0], msb);
                st.write(g[1], w);
                st.write(g[2], lsb);
                let out = simulate(&emb, &st).expect("well-formed");
                let expect = embed_bit(lsb as u8, w as u8, v, params) as u64;
                let got = out.read(g[2]);
                let ok = got == expect && out.read(g[3]) == 0 && out.read(g[0]) == msb;

                let mut xs = BasisState::zeros(ext.wire_count());
                xs.write(h[0], msb);
                xs.write(h[1], got);
                let xo = simulate(&ext, &xs).expect("well-formed");
                let recovered = xo.read(h[2]);
                let table = extract_bit(got as u8, v, params) as u64;
                let ok = ok && recovered == w && recovered == table && xo.read(h[3]) == 0;
                if !suite.check(ok, || {
                    format!(
                        "msb={msb:04b} w={w} lsb={lsb}: expected lsb {expect}, got {got}; \
                         extracted {recovered}; wires in={st} out={out}"
                    )
                }) {
                    return suite.finish();
                }
            }
        }
    }
    suite.finish()
}

pub fn verify_qib(width: usize, trials: u64, seed: u64) -> SuiteResult {
    let mut suite = Suite::new(format!("qib width={width} randomized"));
    let c = match build_qib(width) {
        Ok(c) => c,
        Err(e) => return suite.fail(e.to_string()),
    };
    let (src, dst) = (c.group("source").unwrap(), c.group("backup").unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mask = if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    };
    for _ in 0..trials {
        let v = rng.gen::<u64>() & mask;
        let mut st = BasisState::zeros(c.wire_count());
        st.write(src, v);
        let out = simulate(&c, &st).expect("well-formed");
        if !suite.check(out.read(src) == v && out.read(dst) == v, || {
            format!("source={v}: backup {} wires out={out}", out.read(dst))
        }) {
            break;
        }
    }
    suite.finish()
}

pub fn verify_qe(width: usize) -> SuiteResult {
    let mut suite = Suite::new(format!("qe width={width} exhaustive"));
    let c = match build_qe(width) {
        Ok(c) => c,
        Err(e) => return suite.fail(e.to_string()),
    };
    let g = groups(&c, &["a", "b", "flag"]).unwrap();
    let n = 1u64 << width;
    for a in 0..n {
        for b in 0..n {
            let mut st = BasisState::zeros(c.wire_count());
            st.write(g[0], a);
            st.write(g[1], b);
            let out = simulate(&c, &st).expect("well-formed");
            let expect = u64::from(a == b);
            let ok = out.read(g[2]) == expect && out.read(g[0]) == a && out.read(g[1]) == b;
            if !suite.check(ok, || {
                format!("a={a} b={b}: flag {} wires out={out}", out.read(g[2]))
            }) {
                return suite.finish();
            }
        }
    }
    suite.finish()
}

/// Simulating the mirrored gate list after the circuit restores the input,
/// over every basis state for small circuits and `samples` random ones otherwise.
pub fn verify_reversible(name: &str, c: &Circuit, samples: u64, seed: u64) -> SuiteResult {
    let mut suite = Suite::new(format!("reversibility {name}"));
    let inv = c.inverse();
    let n = c.wire_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exhaustive = n <= 12;
    let total = if exhaustive { 1u64 << n } else { samples };
    for i in 0..total {
        let st = if exhaustive {
            let mut s = BasisState::zeros(n);
            s.write(&(0..n).collect::<Vec<_>>(), i);
            s
        } else {
            BasisState::from_bits((0..n).map(|_| rng.gen()).collect())
        };
        let back = simulate(&inv, &simulate(c, &st).expect("well-formed")).expect("well-formed");
        if !suite.check(back == st, || format!("state {st} came back as {back}")) {
            break;
        }
    }
    suite.finish()
}

/// Ancillas (`select`, `flag` of QBS; `v` of the pixel slices; `b` of QE)
/// return to their entry value on random inputs with zeroed ancillas.
pub fn verify_ancilla_hygiene(seed: u64) -> SuiteResult {
    let mut suite = Suite::new("ancilla hygiene");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases: Vec<(Circuit, Vec<&'static str>, Vec<&'static str>)> = vec![
        (build_qe(4).unwrap(), vec!["a", "b"], vec!["b"]),
        (
            build_qbs(2).unwrap(),
            vec!["y", "x", "ext_y", "ext_x", "color"],
            vec!["select", "flag"],
        ),
    ];
    for p in hdwm_configs() {
        cases.push((
            build_hdwm_pixel(&p).unwrap(),
            vec!["msb", "w", "lsb"],
            vec!["v"],
        ));
        cases.push((
            build_hdwm_extract_pixel(&p).unwrap(),
            vec!["msb", "lsb"],
            vec!["v"],
        ));
    }
    for (c, inputs, ancillas) in &cases {
        for _ in 0..256 {
            let mut st = BasisState::zeros(c.wire_count());
            for name in inputs {
                let w = c.group(name).unwrap();
                st.write(w, rng.gen::<u64>() & ((1u64 << w.len()) - 1));
            }
            let out = simulate(c, &st).expect("well-formed");
            for name in ancillas {
                let w = c.group(name).unwrap();
                if !suite.check(out.read(w) == st.read(w), || {
                    format!("ancilla `{name}` left at {} for input {st}", out.read(w))
                }) {
                    return suite.finish();
                }
            }
        }
    }
    suite.finish()
}

/// Every equivalence suite.
pub fn run_all() -> Vec<SuiteResult> {
    let mut out = Vec::new();
    for m in 0..=2 {
        out.extend(verify_qbs(m, 0x5eed + m as u64));
    }
    out.push(verify_majority3());
    for p in hdwm_configs() {
        out.push(verify_hdwm_pixel(&p));
    }
    out.push(verify_qib(8, 1000, 0xb0b));
    out.push(verify_qe(3));

    let mut named: Vec<(String, Circuit)> = vec![
        ("qib".into(), build_qib(8).unwrap()),
        ("qe".into(), build_qe(3).unwrap()),
        ("qbs m=1".into(), build_qbs(1).unwrap()),
        ("qbs m=2".into(), build_qbs(2).unwrap()),
        ("majority3".into(), build_majority3().unwrap()),
    ];
    for p in hdwm_configs() {
        let tag = format!("tau1={} tau2={} eta={}", p.tau1, p.tau2, p.eta);
        named.push((format!("hdwm embed {tag}"), build_hdwm_pixel(&p).unwrap()));
        named.push((
            format!("hdwm extract {tag}"),
            build_hdwm_extract_pixel(&p).unwrap(),
        ));
    }
    for (i, (name, c)) in named.iter().enumerate() {
        out.push(verify_reversible(name, c, 4096, i as u64));
    }
    out.push(verify_ancilla_hygiene(7));
    out
}
