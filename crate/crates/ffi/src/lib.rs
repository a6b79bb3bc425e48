//! C ABI over `lyrimeter-core`.
//!
//! Objects cross the boundary as opaque handles created by `*_load` or
//! `*_bundled` functions and released with the matching `*_free`. Every
//! fallible call returns a [`LyrimeterStatus`]; on failure a description
//! is available from [`lyrimeter_last_error`] until the next failing call
//! on the same thread. Output parameters are written only on success (the
//! one exception, the length reported on `BufferTooSmall`, is documented
//! at its function).

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use lyrimeter::features::{Featurizer, TimeSignature};
use lyrimeter::lexicon::{load_lexicon, stress_pattern, PronunciationLexicon, RemnantList, StopwordPolicy};
use lyrimeter::models::{load_model, ModelBundle};
use lyrimeter::patterning::{LyricsText, Patterner};
use lyrimeter::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LyrimeterStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Format = 4,
    Degenerate = 5,
    Argument = 6,
    NotFound = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LyrimeterTimeSignature {
    ThreeFour = 0,
    FourFour = 1,
}

/// Pronunciation dictionary.
pub struct LyrimeterLexicon {
    owned: Option<PronunciationLexicon>,
}

impl LyrimeterLexicon {
    fn get(&self) -> &PronunciationLexicon {
        self.owned.as_ref().unwrap_or_else(|| PronunciationLexicon::bundled())
    }
}

/// Trained model together with the feature configuration it expects.
pub struct LyrimeterModel {
    bundle: ModelBundle,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

struct Failure(LyrimeterStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Io { .. } => LyrimeterStatus::Io,
            Error::Parse { .. } | Error::Format(_) => LyrimeterStatus::Format,
            Error::Degenerate(_) => LyrimeterStatus::Degenerate,
            Error::Argument(_) => LyrimeterStatus::Argument,
            Error::NotFound(_) => LyrimeterStatus::NotFound,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(LyrimeterStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> LyrimeterStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LyrimeterStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            LyrimeterStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(LyrimeterStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lyrimeter_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Description of the last failure on this thread, or an empty string.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn lyrimeter_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// The dictionary compiled into the library.
///
/// # Safety
/// `out_lexicon` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lyrimeter_lexicon_bundled(out_lexicon: *mut *mut LyrimeterLexicon) -> LyrimeterStatus {
    guard(|| {
        let slot = out(out_lexicon, "out_lexicon")?;
        *slot = Box::into_raw(Box::new(LyrimeterLexicon { owned: None }));
        Ok(())
    })
}

/// Loads a dictionary in the CMU text format.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out_lexicon` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lyrimeter_lexicon_load(
    path: *const c_char,
    out_lexicon: *mut *mut LyrimeterLexicon,
) -> LyrimeterStatus {
    guard(|| {
        let path = text(path, "path")?;
        let slot = out(out_lexicon, "out_lexicon")?;
        let lex = load_lexicon(Path::new(path))?;
        *slot = Box::into_raw(Box::new(LyrimeterLexicon { owned: Some(lex) }));
        Ok(())
    })
}

/// Releases a lexicon; null is ignored.
///
/// # Safety
/// `lexicon` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lyrimeter_lexicon_free(lexicon: *mut LyrimeterLexicon) {
    if !lexicon.is_null() {
        drop(Box::from_raw(lexicon));
    }
}

/// Stress digits (0, 1 or 2 per syllable) of `word`. Words missing from
/// the dictionary are scored by the vowel-group heuristic when `fallback`
/// is nonzero and fail with `NotFound` otherwise.
///
/// `*out_len` always receives the syllable count on success or on
/// `BufferTooSmall`, so callers can size `buf` and retry.
///
/// # Safety
/// `buf` must be valid for `cap` bytes (it may be null when `cap` is 0).
#[no_mangle]
pub unsafe extern "C" fn lyrimeter_stress_pattern(
    lexicon: *const LyrimeterLexicon,
    word: *const c_char,
    fallback: i32,
    buf: *mut u8,
    cap: usize,
    out_len: *mut usize,
) -> LyrimeterStatus {
    guard(|| {
        let lex = handle(lexicon, "lexicon")?;
        let word = text(word, "word")?;
        let len = out(out_len, "out_len")?;
        let digits = stress_pattern(lex.get(), word, fallback != 0)?.digits();
        *len = digits.len();
        if digits.len() > cap {
            return Err(Failure(
                LyrimeterStatus::BufferTooSmall,
                format!("{} syllables do not fit in {cap} bytes", digits.len()),
            ));
        }
        if !digits.is_empty() {
            if buf.is_null() {
                return Err(null("buf"));
            }
            ptr::copy_nonoverlapping(digits.as_ptr(), buf, digits.len());
        }
        Ok(())
    })
}

/// Loads a model file written by `lyrimeter train`.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out_model` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lyrimeter_model_load(
    path: *const c_char,
    out_model: *mut *mut LyrimeterModel,
) -> LyrimeterStatus {
    guard(|| {
        let path = text(path, "path")?;
        let slot = out(out_model, "out_model")?;
        let bundle = load_model(Path::new(path))?;
        *slot = Box::into_raw(Box::new(LyrimeterModel { bundle }));
        Ok(())
    })
}

/// Releases a model; null is ignored.
///
/// # Safety
/// `model` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lyrimeter_model_free(model: *mut LyrimeterModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of features the model expects.
///
/// # Safety
/// `model` must be a live handle and `out_dim` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lyrimeter_model_dimensionality(
    model: *const LyrimeterModel,
    out_dim: *mut usize,
) -> LyrimeterStatus {
    guard(|| {
        let m = handle(model, "model")?;
        *out(out_dim, "out_dim")? = m.bundle.model.dimensionality();
        Ok(())
    })
}

fn classify(p: f64) -> LyrimeterTimeSignature {
    match TimeSignature::from_positive(p >= 0.5) {
        TimeSignature::ThreeFour => LyrimeterTimeSignature::ThreeFour,
        TimeSignature::FourFour => LyrimeterTimeSignature::FourFour,
    }
}

/// Probability of four-four time for a ready-made feature row, plus the
/// label at threshold 0.5. `out_label` may be null.
///
/// # Safety
/// `features` must be valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn lyrimeter_model_predict_features(
    model: *const LyrimeterModel,
    features: *const f64,
    len: usize,
    out_probability: *mut f64,
    out_label: *mut LyrimeterTimeSignature,
) -> LyrimeterStatus {
    guard(|| {
        let m = handle(model, "model")?;
        if features.is_null() && len > 0 {
            return Err(null("features"));
        }
        let row: &[f64] = if len == 0 {
            &[]
        } else {
            std::slice::from_raw_parts(features, len)
        };
        let prob = out(out_probability, "out_probability")?;
        let p = m.bundle.model.predict_proba(row)?;
        *prob = p;
        if let Some(l) = out_label.as_mut() {
            *l = classify(p);
        }
        Ok(())
    })
}

/// Featurizes one song's lyrics with the configuration stored in the
/// model and predicts its time signature. `lexicon` may be null to use
/// the bundled dictionary; `out_label` may be null.
///
/// # Safety
/// `lyrics` must be a NUL-terminated string; handles must be live.
#[no_mangle]
pub unsafe extern "C" fn lyrimeter_model_predict_lyrics(
    model: *const LyrimeterModel,
    lexicon: *const LyrimeterLexicon,
    lyrics: *const c_char,
    out_probability: *mut f64,
    out_label: *mut LyrimeterTimeSignature,
) -> LyrimeterStatus {
    guard(|| {
        let m = handle(model, "model")?;
        let lex = lexicon
            .as_ref()
            .map_or_else(|| PronunciationLexicon::bundled(), |l| l.get());
        let lyrics = text(lyrics, "lyrics")?;
        let prob = out(out_probability, "out_probability")?;
        let stopwords = StopwordPolicy::default();
        let remnants = RemnantList::default();
        let patterner = Patterner::new(lex, &stopwords, &remnants, m.bundle.patterning);
        let featurizer = Featurizer::new(patterner, m.bundle.features.clone(), m.bundle.options);
        let fv = featurizer.featurize(&LyricsText::new("ffi", lyrics))?;
        let p = m.bundle.model.predict_proba(&fv.values)?;
        *prob = p;
        if let Some(l) = out_label.as_mut() {
            *l = classify(p);
        }
        Ok(())
    })
}
