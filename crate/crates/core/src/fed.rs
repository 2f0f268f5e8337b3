//! In-process federated training.
//!
//! A central node broadcasts the global [`ParamBundle`] each round, every
//! [`ClientNode`] trains it on the shard it keeps to itself, and the central
//! node averages what comes back. Only bundles cross the client boundary;
//! there is no way to read a shard back out of a client.
//!
//! Results are bit-identical for a given seed no matter how clients are
//! scheduled: each client draws from its own `(seed, round, client)` stream,
//! and [`fedavg`] does not depend on the order bundles arrive in.

use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::optim::OptimizerSpec;
use crate::rng::{self, Purpose};
use crate::rnn::{Architecture, ModelKind, Sample};

/// Flat trainable vector tagged with the model it belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamBundle {
    kind: ModelKind,
    params: Vec<f64>,
}

impl ParamBundle {
    pub fn new(arch: &Architecture, params: Vec<f64>) -> Result<Self> {
        let expected = arch.param_count()?;
        if params.len() != expected {
            return Err(Error::Dimension {
                what: "parameter bundle",
                expected,
                found: params.len(),
            });
        }
        Ok(Self {
            kind: arch.kind(),
            params,
        })
    }

    pub fn initial(arch: &Architecture, seed: u64) -> Result<Self> {
        Self::new(arch, arch.init_params(seed)?)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn into_params(self) -> Vec<f64> {
        self.params
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    fn check(&self, arch: &Architecture) -> Result<()> {
        if self.kind != arch.kind() || self.params.len() != arch.param_count()? {
            return Err(Error::HeterogeneousBundles);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FedConfig {
    pub rounds: usize,
    pub clients: usize,
    pub local_epochs: usize,
    /// `None` trains on the whole shard in one step per epoch.
    pub batch_size: Option<usize>,
    pub optimizer: OptimizerSpec,
    pub seed: u64,
}

impl Default for FedConfig {
    fn default() -> Self {
        Self {
            rounds: 100,
            clients: 4,
            local_epochs: 1,
            batch_size: None,
            optimizer: OptimizerSpec::default(),
            seed: 0,
        }
    }
}

impl FedConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |key, reason| Err(Error::Config { key, reason });
        if self.rounds == 0 {
            return bad("rounds", "must be at least 1");
        }
        if self.clients == 0 {
            return bad("clients", "must be at least 1");
        }
        if self.local_epochs == 0 {
            return bad("local_epochs", "must be at least 1");
        }
        if self.batch_size == Some(0) {
            return bad("batch_size", "must be at least 1");
        }
        self.optimizer.validate()
    }
}

/// Global losses after one round of aggregation. Rounds count from 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundRecord {
    pub round: usize,
    pub train_loss: f64,
    pub test_loss: f64,
}

/// Seeded shuffle, then dealt round-robin: shard sizes differ by at most one.
pub fn partition(samples: &[Sample], clients: usize, seed: u64) -> Result<Vec<Vec<Sample>>> {
    if clients == 0 {
        return Err(Error::Config {
            key: "clients",
            reason: "must be at least 1",
        });
    }
    if samples.len() < clients {
        return Err(Error::Dimension {
            what: "training set (fewer samples than clients)",
            expected: clients,
            found: samples.len(),
        });
    }
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.shuffle(&mut rng::stream(seed, Purpose::Partition, 0, 0));
    let mut shards: Vec<Vec<Sample>> = (0..clients).map(|_| Vec::new()).collect();
    for (k, &i) in order.iter().enumerate() {
        shards[k % clients].push(samples[i].clone());
    }
    Ok(shards)
}

/// Trains `bundle` on `shard` for `config.local_epochs` passes with a fresh
/// optimizer. Mini-batch order, when batching is on, comes from the
/// `(seed, round, client)` stream.
pub fn local_train(
    arch: &Architecture,
    bundle: &ParamBundle,
    shard: &[Sample],
    config: &FedConfig,
    round: usize,
    client: usize,
) -> Result<ParamBundle> {
    bundle.check(arch)?;
    if shard.is_empty() {
        return Err(Error::Empty("client shard"));
    }
    let mut params = bundle.params.clone();
    let mut opt = config.optimizer.start(params.len());
    let batch = config.batch_size.unwrap_or(shard.len()).min(shard.len());
    let mut order: Vec<usize> = (0..shard.len()).collect();
    let mut rng = rng::stream(
        config.seed,
        Purpose::ClientBatches,
        round as u32,
        client as u32,
    );
    let mut buf = Vec::with_capacity(batch);
    for _ in 0..config.local_epochs {
        let full = batch == shard.len();
        if !full {
            order.shuffle(&mut rng);
        }
        for chunk in order.chunks(batch) {
            let (loss, grad) = if full {
                arch.loss_and_grad(&params, shard)?
            } else {
                buf.clear();
                buf.extend(chunk.iter().map(|&i| shard[i].clone()));
                arch.loss_and_grad(&params, &buf)?
            };
            if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(Error::NonFiniteLoss {
                    round,
                    client: Some(client),
                });
            }
            opt.step(&mut params, &grad)?;
        }
    }
    Ok(ParamBundle {
        kind: bundle.kind,
        params,
    })
}

/// Elementwise mean.
///
/// Each coordinate's values are sorted before a running-mean accumulation,
/// so the result is bitwise independent of bundle order and identical
/// bundles average to themselves exactly.
pub fn fedavg(bundles: &[ParamBundle]) -> Result<ParamBundle> {
    let first = bundles.first().ok_or(Error::Empty("bundle list"))?;
    if bundles
        .iter()
        .any(|b| b.kind != first.kind || b.params.len() != first.params.len())
    {
        return Err(Error::HeterogeneousBundles);
    }
    let mut column = Vec::with_capacity(bundles.len());
    let params = (0..first.params.len())
        .map(|k| {
            column.clear();
            column.extend(bundles.iter().map(|b| b.params[k]));
            column.sort_unstable_by(f64::total_cmp);
            column
                .iter()
                .enumerate()
                .fold(0.0, |m, (i, &x)| m + (x - m) / (i + 1) as f64)
        })
        .collect();
    Ok(ParamBundle {
        kind: first.kind,
        params,
    })
}

/// Runs one round's client jobs. Implementations may run them in any order
/// or concurrently but must return results indexed by client.
pub trait ClientExecutor {
    fn execute(
        &self,
        clients: usize,
        job: &(dyn Fn(usize) -> Result<ParamBundle> + Sync),
    ) -> Vec<Result<ParamBundle>>;
}

/// One client after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Serial;

impl ClientExecutor for Serial {
    fn execute(
        &self,
        clients: usize,
        job: &(dyn Fn(usize) -> Result<ParamBundle> + Sync),
    ) -> Vec<Result<ParamBundle>> {
        (0..clients).map(job).collect()
    }
}

/// A participant holding a private shard.
#[derive(Debug, Clone)]
pub struct ClientNode {
    id: usize,
    shard: Vec<Sample>,
}

impl ClientNode {
    pub fn new(id: usize, shard: Vec<Sample>) -> Self {
        Self { id, shard }
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn shard_len(&self) -> usize {
        self.shard.len()
    }

    pub fn train(
        &self,
        arch: &Architecture,
        global: &ParamBundle,
        config: &FedConfig,
        round: usize,
    ) -> Result<ParamBundle> {
        local_train(arch, global, &self.shard, config, round, self.id)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FedOutcome {
    pub history: Vec<RoundRecord>,
    pub model: ParamBundle,
}

/// Central node plus its clients.
#[derive(Debug, Clone)]
pub struct Federation {
    arch: Architecture,
    config: FedConfig,
    clients: Vec<ClientNode>,
    train: Vec<Sample>,
    test: Vec<Sample>,
}

impl Federation {
    /// Partitions `train` over `config.clients` clients.
    pub fn new(
        arch: Architecture,
        config: FedConfig,
        train: Vec<Sample>,
        test: Vec<Sample>,
    ) -> Result<Self> {
        config.validate()?;
        let shards = partition(&train, config.clients, config.seed)?;
        Self::with_shards(arch, config, shards, train, test)
    }

    /// Uses the given shards as-is, one client per shard; `config.clients`
    /// is ignored. The central node evaluates on `train` and `test`.
    pub fn with_shards(
        arch: Architecture,
        config: FedConfig,
        shards: Vec<Vec<Sample>>,
        train: Vec<Sample>,
        test: Vec<Sample>,
    ) -> Result<Self> {
        config.validate()?;
        arch.param_count()?;
        if shards.is_empty() {
            return Err(Error::Empty("client list"));
        }
        if shards.iter().any(Vec::is_empty) {
            return Err(Error::Empty("client shard"));
        }
        if train.is_empty() {
            return Err(Error::Empty("training set"));
        }
        if test.is_empty() {
            return Err(Error::Empty("test set"));
        }
        let clients = shards
            .into_iter()
            .enumerate()
            .map(|(id, shard)| ClientNode::new(id, shard))
            .collect();
        Ok(Self {
            arch,
            config,
            clients,
            train,
            test,
        })
    }

    pub fn architecture(&self) -> &Architecture {
        &self.arch
    }

    pub fn config(&self) -> &FedConfig {
        &self.config
    }

    pub fn clients(&self) -> &[ClientNode] {
        &self.clients
    }

    /// Global train and test MSE of `bundle`.
    pub fn evaluate(&self, bundle: &ParamBundle) -> Result<(f64, f64)> {
        bundle.check(&self.arch)?;
        let predictor = self.arch.predictor(&bundle.params)?;
        let mse = |set: &[Sample]| -> Result<f64> {
            let preds = predictor.predict(set)?;
            let targets: Vec<f64> = set.iter().map(|s| s.target).collect();
            crate::rnn::mse_loss(&preds, &targets)
        };
        Ok((mse(&self.train)?, mse(&self.test)?))
    }

    /// Starts from the seeded initial model.
    pub fn run(
        &self,
        executor: &dyn ClientExecutor,
        observer: &mut dyn FnMut(&RoundRecord),
    ) -> Result<FedOutcome> {
        let init = ParamBundle::initial(&self.arch, self.config.seed)?;
        self.run_from(init, executor, observer)
    }

    pub fn run_from(
        &self,
        initial: ParamBundle,
        executor: &dyn ClientExecutor,
        observer: &mut dyn FnMut(&RoundRecord),
    ) -> Result<FedOutcome> {
        initial.check(&self.arch)?;
        let mut global = initial;
        let mut history = Vec::with_capacity(self.config.rounds);
        for round in 1..=self.config.rounds {
            let broadcast = &global;
            let job = |c: usize| self.clients[c].train(&self.arch, broadcast, &self.config, round);
            let updates = executor
                .execute(self.clients.len(), &job)
                .into_iter()
                .collect::<Result<Vec<_>>>()?;
            if updates.len() != self.clients.len() {
                return Err(Error::Dimension {
                    what: "client updates",
                    expected: self.clients.len(),
                    found: updates.len(),
                });
            }
            global = fedavg(&updates)?;
            let (train_loss, test_loss) = self.evaluate(&global)?;
            if !train_loss.is_finite() || !test_loss.is_finite() {
                return Err(Error::NonFiniteLoss {
                    round,
                    client: None,
                });
            }
            let record = RoundRecord {
                round,
                train_loss,
                test_loss,
            };
            observer(&record);
            history.push(record);
        }
        Ok(FedOutcome {
            history,
            model: global,
        })
    }
}

/// Partition, then run serially with no observer.
pub fn run_federation(
    arch: Architecture,
    config: FedConfig,
    train: &[Sample],
    test: &[Sample],
) -> Result<FedOutcome> {
    Federation::new(arch, config, train.to_vec(), test.to_vec())?.run(&Serial, &mut |_| {})
}

/// The non-federated baseline: one node holding all training data, trained
/// with the same schedule as a federated client.
pub fn train_centralized(
    arch: Architecture,
    config: FedConfig,
    train: &[Sample],
    test: &[Sample],
) -> Result<FedOutcome> {
    Federation::with_shards(
        arch,
        config,
        alloc::vec![train.to_vec()],
        train.to_vec(),
        test.to_vec(),
    )?
    .run(&Serial, &mut |_| {})
}
