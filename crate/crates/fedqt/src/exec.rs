use fedqt_core::fed::{ClientExecutor, ParamBundle};
use rayon::prelude::*;

/// Trains a round's clients on the rayon pool. Results come back indexed by
/// client, so histories match [`fedqt_core::fed::Serial`] bit for bit.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rayon;

impl ClientExecutor for Rayon {
    fn execute(
        &self,
        clients: usize,
        job: &(dyn Fn(usize) -> fedqt_core::Result<ParamBundle> + Sync),
    ) -> Vec<fedqt_core::Result<ParamBundle>> {
        (0..clients).into_par_iter().map(job).collect()
    }
}
