use std::borrow::Cow;

use aqsm_core::aqsm::make_scale_plan;
use aqsm_core::attacks::{crop_topleft_with_exponent, salt_pepper as sp, AREA_EXPONENT};
use aqsm_core::experiment;
use aqsm_core::hdwm::{eta_for_scale, EmbedParams, DEFAULT_LAMBDA};
use aqsm_core::metrics::MetricsReport;
use aqsm_core::pgm::{read_pgm, write_pgm};
use aqsm_core::pipeline::{self, embed_with_params, WatermarkKey};
use aqsm_core::qsim::verify::run_all;
use aqsm_core::{GrayImage, StegoImage};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(
    aqsm,
    AqsmError,
    PyValueError,
    "Raised for every library error; the message starts with the error category."
);

fn err(e: aqsm_core::Error) -> PyErr {
    AqsmError::new_err(format!("{}: {e}", e.category()))
}

/// Square 8-bit grayscale image with a power-of-two side.
#[pyclass(name = "Image", module = "aqsm", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyImage(GrayImage);

#[pymethods]
impl PyImage {
    /// `pixels` is row-major, `side * side` bytes.
    #[new]
    fn new(side: usize, pixels: Vec<u8>) -> PyResult<Self> {
        if !side.is_power_of_two() {
            return Err(err(aqsm_core::Error::SideNotPowerOfTwo(side)));
        }
        GrayImage::new(side.trailing_zeros(), pixels)
            .map(Self)
            .map_err(err)
    }

    #[staticmethod]
    fn from_pgm(data: &[u8]) -> PyResult<Self> {
        read_pgm(data).map(Self).map_err(err)
    }

    fn to_pgm(&self) -> Cow<'_, [u8]> {
        Cow::Owned(write_pgm(&self.0))
    }

    #[getter]
    fn side(&self) -> usize {
        self.0.side()
    }

    fn pixels(&self) -> Cow<'_, [u8]> {
        Cow::Borrowed(self.0.pixels())
    }

    fn get(&self, y: usize, x: usize) -> PyResult<u8> {
        if y >= self.0.side() || x >= self.0.side() {
            return Err(pyo3::exceptions::PyIndexError::new_err(
                "pixel out of range",
            ));
        }
        Ok(self.0.get(y, x))
    }

    fn __repr__(&self) -> String {
        format!("Image(side={})", self.0.side())
    }
}

/// Extraction key produced by `embed`.
#[pyclass(name = "Key", module = "aqsm", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyKey(WatermarkKey);

#[pymethods]
impl PyKey {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        WatermarkKey::from_json(text).map(Self).map_err(err)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn r(&self) -> u32 {
        self.0.r
    }

    #[getter]
    fn tau1(&self) -> u8 {
        self.0.tau1
    }

    #[getter]
    fn tau2(&self) -> u8 {
        self.0.tau2
    }

    #[getter]
    fn eta(&self) -> u8 {
        self.0.eta
    }

    #[getter]
    fn lambda_(&self) -> f64 {
        self.0.lambda
    }

    fn __repr__(&self) -> String {
        format!(
            "Key(r={}, tau1={}, tau2={}, eta={})",
            self.0.r, self.0.tau1, self.0.tau2, self.0.eta
        )
    }
}

/// Embeds `watermark` into `carrier`; returns `(stego, key)`.
#[pyfunction]
#[pyo3(signature = (carrier, watermark, lambda_=DEFAULT_LAMBDA, plain=false))]
fn embed(
    carrier: &PyImage,
    watermark: &PyImage,
    lambda_: f64,
    plain: bool,
) -> PyResult<(PyImage, PyKey)> {
    let (c, w) = (&carrier.0, &watermark.0);
    let StegoImage { image, key } = if plain {
        let r = c.side_exp().saturating_sub(w.side_exp());
        embed_with_params(c, w, EmbedParams::plain(lambda_, eta_for_scale(r)))
    } else {
        pipeline::embed(c, w, lambda_)
    }
    .map_err(err)?;
    Ok((PyImage(image), PyKey(key)))
}

#[pyfunction]
fn extract(stego: &PyImage, key: &PyKey) -> PyResult<PyImage> {
    pipeline::extract(&stego.0, &key.0)
        .map(PyImage)
        .map_err(err)
}

/// Embedding capacity `1 / 4^r` as `(numerator, denominator)`.
#[pyfunction]
fn capacity(r: u32) -> PyResult<(u64, u64)> {
    let c = pipeline::capacity(r).map_err(err)?;
    Ok((*c.numer(), *c.denom()))
}

#[pyfunction]
fn scale_plan(py: Python<'_>, r: u32) -> PyResult<Bound<'_, PyDict>> {
    let p = make_scale_plan(r).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("r", p.r)?;
    d.set_item("beta", p.beta)?;
    d.set_item("alpha", p.alpha)?;
    d.set_item("d", p.d)?;
    d.set_item("q", p.q)?;
    d.set_item("eta", p.eta)?;
    d.set_item("copies_low", p.copies_low)?;
    d.set_item("copies_high", p.copies_high)?;
    d.set_item("block_count", p.block_count)?;
    Ok(d)
}

/// `{"mse", "psnr", "ssim", "ncc"}`; PSNR is `inf` for identical images.
#[pyfunction]
fn metrics<'py>(py: Python<'py>, a: &PyImage, b: &PyImage) -> PyResult<Bound<'py, PyDict>> {
    let m = MetricsReport::compute(&a.0, &b.0).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("mse", m.mse)?;
    d.set_item("psnr", m.psnr)?;
    d.set_item("ssim", m.ssim)?;
    d.set_item("ncc", m.ncc)?;
    Ok(d)
}

#[pyfunction]
fn salt_pepper(img: &PyImage, density: f64, seed: u64) -> PyResult<PyImage> {
    sp(&img.0, density, seed).map(PyImage).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (img, fraction, exponent=AREA_EXPONENT))]
fn crop(img: &PyImage, fraction: f64, exponent: f64) -> PyResult<PyImage> {
    crop_topleft_with_exponent(&img.0, fraction, exponent)
        .map(PyImage)
        .map_err(err)
}

#[pyfunction]
fn synthetic_logo(side: usize, bright_fraction: f64) -> PyResult<PyImage> {
    if !side.is_power_of_two() || !(0.0..=1.0).contains(&bright_fraction) {
        return Err(err(aqsm_core::Error::InvalidParameter(format!(
            "side {side}, bright fraction {bright_fraction}"
        ))));
    }
    Ok(PyImage(experiment::synthetic_logo(
        side.trailing_zeros(),
        bright_fraction,
    )))
}

/// Runs every circuit check; returns `[(name, passed, cases, counterexample)]`.
#[pyfunction]
fn verify_circuits(py: Python<'_>) -> Vec<(String, bool, u64, Option<String>)> {
    py.detach(run_all)
        .into_iter()
        .map(|r| {
            let passed = r.passed();
            (r.name, passed, r.cases, r.counterexample)
        })
        .collect()
}

#[pymodule]
fn aqsm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("AqsmError", m.py().get_type::<AqsmError>())?;
    m.add_class::<PyImage>()?;
    m.add_class::<PyKey>()?;
    m.add_function(wrap_pyfunction!(embed, m)?)?;
    m.add_function(wrap_pyfunction!(extract, m)?)?;
    m.add_function(wrap_pyfunction!(capacity, m)?)?;
    m.add_function(wrap_pyfunction!(scale_plan, m)?)?;
    m.add_function(wrap_pyfunction!(metrics, m)?)?;
    m.add_function(wrap_pyfunction!(salt_pepper, m)?)?;
    m.add_function(wrap_pyfunction!(crop, m)?)?;
    m.add_function(wrap_pyfunction!(synthetic_logo, m)?)?;
    m.add_function(wrap_pyfunction!(verify_circuits, m)?)?;
    Ok(())
}
