pub mod emit;
pub mod eval;
pub mod fewshot;
pub mod import;
pub mod inspect;
pub mod parse;
pub mod pipeline;
pub mod report;

pub(crate) fn is_false(b: &bool) -> bool {
    !*b
}
