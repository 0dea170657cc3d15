use super::{Circuit, Control, Gate};
use crate::error::{Error, Result};
use crate::hdwm::EmbedParams;

/// Image backup: CNOT fan from `source` onto a zeroed `backup` register.
pub fn build_qib(width: usize) -> Result<Circuit> {
    if width == 0 {
        return Err(Error::Circuit("QIB width must be at least 1".into()));
    }
    let mut c = Circuit::new(0);
    let src = c.add_register("source", width);
    let dst = c.add_register("backup", width);
    c.extend(src.iter().zip(&dst).map(|(&s, &d)| Gate::cnot(s, d)))?;
    Ok(c)
}

/// Sets `flag` iff `a == b`. `b` is XORed with `a`, tested for all-zero
/// with a negatively controlled MCX, then restored.
pub fn build_qe(width: usize) -> Result<Circuit> {
    if width == 0 {
        return Err(Error::Circuit("QE width must be at least 1".into()));
    }
    let mut c = Circuit::new(0);
    let a = c.add_register("a", width);
    let b = c.add_register("b", width);
    let flag = c.add_register("flag", 1)[0];
    let fold: Vec<Gate> = a.iter().zip(&b).map(|(&x, &y)| Gate::cnot(x, y)).collect();
    c.extend(fold.iter().cloned())?;
    c.push(Gate::mcx(
        b.iter().map(|&w| Control::neg(w)).collect(),
        flag,
    ))?;
    c.extend(fold)?;
    Ok(c)
}

/// Gates that toggle `flag` iff `reg == value`, using `scratch` (same width,
/// zero on entry and exit) as the comparison register.
fn equal_const_gates(reg: &[usize], value: u64, scratch: &[usize], flag: usize) -> Vec<Gate> {
    let mut prep: Vec<Gate> = scratch
        .iter()
        .enumerate()
        .filter(|(i, _)| (value >> i) & 1 == 1)
        .map(|(_, &w)| Gate::x(w))
        .collect();
    prep.extend(reg.iter().zip(scratch).map(|(&r, &s)| Gate::cnot(r, s)));
    let mut out = prep.clone();
    out.push(Gate::mcx(
        scratch.iter().map(|&w| Control::neg(w)).collect(),
        flag,
    ));
    out.extend(prep.into_iter().rev());
    out
}

/// Block splicing for four `2^m` binary images sharing one position register.
///
/// Wire groups: `y`, `x` (m wires each, shared block position), `ext_y`,
/// `ext_x` (the new top position bits), `color` (one wire per block, its
/// value at the shared position), `out` (spliced color, zero on entry),
/// ancillas `select` and `flag`. For each quadrant `k` the extension bits
/// are compared with `k` and, on a match, block `k`'s color is copied to
/// `out`.
pub fn build_qbs(m: usize) -> Result<Circuit> {
    let mut c = Circuit::new(0);
    c.add_register("y", m);
    c.add_register("x", m);
    let ey = c.add_register("ext_y", 1)[0];
    let ex = c.add_register("ext_x", 1)[0];
    let color = c.add_register("color", 4);
    let out = c.add_register("out", 1)[0];
    let select = c.add_register("select", 2);
    let flag = c.add_register("flag", 1)[0];
    // quadrant k = 2 * ext_y + ext_x
    let ext = [ex, ey];
    for (k, &col) in color.iter().enumerate() {
        let cmp = equal_const_gates(&ext, k as u64, &select, flag);
        c.extend(cmp.iter().cloned())?;
        c.push(Gate::toffoli(flag, col, out))?;
        c.extend(cmp)?;
    }
    Ok(c)
}

/// Majority of three: `out ^= ab ^ bc ^ ca`.
pub fn build_majority3() -> Result<Circuit> {
    let mut c = Circuit::new(0);
    let i = c.add_register("inputs", 3);
    let out = c.add_register("out", 1)[0];
    c.extend([
        Gate::toffoli(i[0], i[1], out),
        Gate::toffoli(i[1], i[2], out),
        Gate::toffoli(i[0], i[2], out),
    ])?;
    Ok(c)
}

fn xor_flag_fan(msb: &[usize], eta: u8, v: usize) -> Vec<Gate> {
    let skip = if eta == 0 { 1 } else { 0 };
    msb[skip..].iter().map(|&w| Gate::cnot(w, v)).collect()
}

/// Per-pixel embedding slice.
///
/// Wire groups: `msb` (pixel bits 4..7, least significant first), `w`
/// (watermark bit), `lsb` (carrier bit being written), `v` (ancilla). The
/// XOR flag is fanned into `v`, the watermark bit is swapped into `lsb`
/// (the old carrier bit ends on `w`), the rule's flips are applied, and `v`
/// is uncomputed.
pub fn build_hdwm_pixel(params: &EmbedParams) -> Result<Circuit> {
    params.validate()?;
    let mut c = Circuit::new(0);
    let msb = c.add_register("msb", 4);
    let w = c.add_register("w", 1)[0];
    let lsb = c.add_register("lsb", 1)[0];
    let v = c.add_register("v", 1)[0];
    let fan = xor_flag_fan(&msb, params.eta, v);
    c.extend(fan.iter().cloned())?;
    c.push(Gate::swap(w, lsb))?;
    if params.tau1 == 1 {
        c.push(Gate::cnot(v, lsb))?;
        if params.tau2 == 1 {
            c.push(Gate::x(lsb))?;
        }
    }
    c.extend(fan)?;
    Ok(c)
}

/// Per-pixel extraction slice: `e ^= rule(lsb, v)` with `v` uncomputed.
/// Wire groups: `msb`, `lsb`, `e` (output, zero on entry), `v` (ancilla).
pub fn build_hdwm_extract_pixel(params: &EmbedParams) -> Result<Circuit> {
    params.validate()?;
    let mut c = Circuit::new(0);
    let msb = c.add_register("msb", 4);
    let lsb = c.add_register("lsb", 1)[0];
    let e = c.add_register("e", 1)[0];
    let v = c.add_register("v", 1)[0];
    let fan = xor_flag_fan(&msb, params.eta, v);
    c.extend(fan.iter().cloned())?;
    c.push(Gate::cnot(lsb, e))?;
    if params.tau1 == 1 {
        c.push(Gate::cnot(v, e))?;
        if params.tau2 == 1 {
            c.push(Gate::x(e))?;
        }
    }
    c.extend(fan)?;
    Ok(c)
}
