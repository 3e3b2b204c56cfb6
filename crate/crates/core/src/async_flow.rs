//! Deferred flows.
//!
//! An [`AsyncFlow`] is a cold description of work: nothing runs until
//! [`AsyncFlow::run`] is awaited, and every `run` re-executes the whole
//! chain. The library spawns no tasks. [`AsyncFlow::gather`] overlaps its
//! members by polling them together inside the caller's task, so any
//! executor that can drive a future works.

use std::future::Future;
use std::panic::AssertUnwindSafe;
use std::sync::Arc;

use futures::future::{self, BoxFuture};
use futures::FutureExt;

use crate::error::{ErrorInfo, ErrorKind};
use crate::flow::Flow;
use crate::instrument;

/// Message of the failure produced by gathering an empty list.
pub const EMPTY_GATHER_MESSAGE: &str = "No flows provided";

type Thunk<S, V> = dyn Fn() -> BoxFuture<'static, Flow<S, V>> + Send + Sync;

pub struct AsyncFlow<S, V> {
    thunk: Arc<Thunk<S, V>>,
}

impl<S, V> Clone for AsyncFlow<S, V> {
    fn clone(&self) -> Self {
        AsyncFlow {
            thunk: Arc::clone(&self.thunk),
        }
    }
}

/// Combines the states of a successful gather group, in input order.
pub struct MergeStrategy<S> {
    merge: Arc<dyn Fn(Vec<S>) -> S + Send + Sync>,
}

impl<S> Clone for MergeStrategy<S> {
    fn clone(&self) -> Self {
        MergeStrategy {
            merge: Arc::clone(&self.merge),
        }
    }
}

impl<S> MergeStrategy<S> {
    /// `merge` must be total on non-empty lists.
    pub fn new(merge: impl Fn(Vec<S>) -> S + Send + Sync + 'static) -> Self {
        MergeStrategy {
            merge: Arc::new(merge),
        }
    }

    pub fn apply(&self, states: Vec<S>) -> S {
        (self.merge)(states)
    }
}

impl<S, V> AsyncFlow<S, V>
where
    S: Send + 'static,
    V: Send + 'static,
{
    fn from_thunk<F>(thunk: F) -> Self
    where
        F: Fn() -> BoxFuture<'static, Flow<S, V>> + Send + Sync + 'static,
    {
        AsyncFlow {
            thunk: Arc::new(thunk),
        }
    }

    /// Wraps an arbitrary deferred computation. A panic while producing the
    /// flow becomes a `StepFault` failure carrying `fallback_state`, the last
    /// state known before the computation ran.
    pub fn deferred<F, Fut>(fallback_state: S, make: F) -> Self
    where
        S: Clone + Sync,
        F: Fn() -> Fut + Send + Sync + 'static,
        Fut: Future<Output = Flow<S, V>> + Send + 'static,
    {
        let make = Arc::new(make);
        AsyncFlow::from_thunk(move || {
            let make = Arc::clone(&make);
            let fallback = fallback_state.clone();
            async move {
                match AssertUnwindSafe(async move { make().await })
                    .catch_unwind()
                    .await
                {
                    Ok(flow) => flow,
                    Err(payload) => Flow::failure(fallback, ErrorInfo::from_panic(payload)),
                }
            }
            .boxed()
        })
    }

    /// Starts a deferred flow with an explicit initial value.
    pub fn start_with(state: S, value: V) -> Self
    where
        S: Clone + Sync,
        V: Clone + Sync,
    {
        AsyncFlow::from_thunk(move || {
            future::ready(Flow::start_with(state.clone(), value.clone())).boxed()
        })
    }

    /// Wraps an already computed flow.
    pub fn lift(flow: Flow<S, V>) -> Self
    where
        Flow<S, V>: Clone + Sync,
    {
        AsyncFlow::from_thunk(move || future::ready(flow.clone()).boxed())
    }

    /// Runs the deferred computation to completion.
    pub async fn run(&self) -> Flow<S, V> {
        (self.thunk)().await
    }

    /// Sequences an asynchronous step. Failures upstream skip the step; a
    /// panic inside the step becomes a `StepFault` failure carrying the
    /// pre-step state.
    pub fn then<R, F, Fut>(self, step: F) -> AsyncFlow<S, R>
    where
        S: Clone,
        R: Send + 'static,
        F: Fn(S, V) -> Fut + Send + Sync + 'static,
        Fut: Future<Output = Flow<S, R>> + Send + 'static,
    {
        let step = Arc::new(step);
        AsyncFlow::from_thunk(move || {
            let upstream = self.clone();
            let step = Arc::clone(&step);
            async move {
                let current = upstream.run().await;
                instrument::record_async_then();
                let (state, value) = match current.into_parts() {
                    (state, Ok(value)) => (state, value),
                    (state, Err(error)) => return Flow::failure(state, error),
                };
                let pre_step = state.clone();
                match AssertUnwindSafe(async move { step(state, value).await })
                    .catch_unwind()
                    .await
                {
                    Ok(next) => next,
                    Err(payload) => Flow::failure(pre_step, ErrorInfo::from_panic(payload)),
                }
            }
            .boxed()
        })
    }

    /// Sequences a synchronous step with the same semantics as
    /// [`Flow::then`].
    pub fn then_sync<R, F>(self, step: F) -> AsyncFlow<S, R>
    where
        S: Clone,
        R: Send + 'static,
        F: Fn(S, V) -> Flow<S, R> + Send + Sync + 'static,
    {
        let step = Arc::new(step);
        self.then(move |state, value| {
            let step = Arc::clone(&step);
            async move { step(state, value) }
        })
    }

    /// Deferred [`Flow::map`].
    pub fn map<R, F>(self, f: F) -> AsyncFlow<S, R>
    where
        R: Send + 'static,
        F: Fn(V) -> R + Send + Sync + 'static,
    {
        let f = Arc::new(f);
        AsyncFlow::from_thunk(move || {
            let upstream = self.clone();
            let f = Arc::clone(&f);
            async move { upstream.run().await.map(|v| f(v)) }.boxed()
        })
    }

    /// Runs every flow concurrently and returns all results in input order.
    /// This is the diagnostic view of a gather group: every failure is kept.
    pub async fn run_all(flows: &[AsyncFlow<S, V>]) -> Vec<Flow<S, V>> {
        future::join_all(flows.iter().map(AsyncFlow::run)).await
    }

    /// Runs independent flows concurrently and collects their values.
    ///
    /// All members run to completion before the group is inspected. If any
    /// failed, the result is the failure of the lowest-index failed member,
    /// regardless of completion order. Otherwise values are returned in
    /// input order and the state is `merge` applied to the member states,
    /// or the last member's state when no strategy is given. An empty input
    /// fails with [`EMPTY_GATHER_MESSAGE`] and a default state.
    pub fn gather(
        flows: Vec<AsyncFlow<S, V>>,
        merge: Option<MergeStrategy<S>>,
    ) -> AsyncFlow<S, Vec<V>>
    where
        S: Default,
    {
        let flows: Arc<[AsyncFlow<S, V>]> = flows.into();
        AsyncFlow::from_thunk(move || {
            let flows = Arc::clone(&flows);
            let merge = merge.clone();
            async move {
                instrument::record_gather();
                if flows.is_empty() {
                    return Flow::failure(
                        S::default(),
                        ErrorInfo::new(ErrorKind::EmptyGather, EMPTY_GATHER_MESSAGE),
                    );
                }
                let results = AsyncFlow::run_all(&flows).await;
                let mut states = Vec::with_capacity(results.len());
                let mut values = Vec::with_capacity(results.len());
                for result in results {
                    match result.into_parts() {
                        (state, Ok(value)) => {
                            states.push(state);
                            values.push(value);
                        }
                        (state, Err(error)) => return Flow::failure(state, error),
                    }
                }
                let final_state = match merge {
                    Some(strategy) => strategy.apply(states),
                    None => states.pop().expect("non-empty gather group"),
                };
                Flow::success(final_state, values)
            }
            .boxed()
        })
    }
}

impl<S> AsyncFlow<S, S>
where
    S: Clone + Send + Sync + 'static,
{
    /// Starts a deferred flow whose value is the state itself.
    pub fn start(state: S) -> Self {
        AsyncFlow::from_thunk(move || future::ready(Flow::start(state.clone())).boxed())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::time::Duration;

    fn block_on<T>(f: impl Future<Output = T>) -> T {
        futures::executor::block_on(f)
    }

    #[test]
    fn start_and_lift_round_trip() {
        assert_eq!(
            block_on(AsyncFlow::start_with(1, 2).run()),
            Flow::success(1, 2)
        );
        assert_eq!(block_on(AsyncFlow::start(4).run()), Flow::success(4, 4));
        let failed: Flow<i32, i32> = Flow::failure(3, ErrorInfo::other("x"));
        assert_eq!(block_on(AsyncFlow::lift(failed.clone()).run()), failed);
    }

    #[test]
    fn construction_is_lazy_and_runs_are_cold() {
        let calls = Arc::new(AtomicUsize::new(0));
        let counter = Arc::clone(&calls);
        let pipeline = AsyncFlow::start_with(0, 1).then(move |s, v: i32| {
            counter.fetch_add(1, Ordering::SeqCst);
            async move { Flow::success(s, v + 1) }
        });
        assert_eq!(calls.load(Ordering::SeqCst), 0);
        let a = block_on(pipeline.run());
        let b = block_on(pipeline.run());
        assert_eq!(a, b);
        assert_eq!(calls.load(Ordering::SeqCst), 2);
    }

    #[test]
    fn failure_skips_async_step() {
        let calls = Arc::new(AtomicUsize::new(0));
        let counter = Arc::clone(&calls);
        let failed: Flow<i32, i32> = Flow::failure(8, ErrorInfo::other("up"));
        let got = block_on(
            AsyncFlow::lift(failed.clone())
                .then(move |s, v| {
                    counter.fetch_add(1, Ordering::SeqCst);
                    async move { Flow::success(s, v) }
                })
                .run(),
        );
        assert_eq!(got, failed);
        assert_eq!(calls.load(Ordering::SeqCst), 0);
    }

    #[test]
    fn async_panic_is_captured() {
        let got: Flow<i32, i32> = block_on(
            AsyncFlow::start_with(6, 0)
                .then(|_, _| async move { panic!("async fault") })
                .run(),
        );
        assert_eq!(*got.state(), 6);
        assert_eq!(got.error_info().unwrap().kind(), ErrorKind::StepFault);

        // Panics raised before the future is created are also contained.
        let got: Flow<i32, i32> = block_on(
            AsyncFlow::start_with(6, 0)
                .then(|_, _| -> future::Ready<Flow<i32, i32>> { panic!("eager fault") })
                .run(),
        );
        assert!(got.error_info().unwrap().message().contains("eager fault"));
    }

    #[test]
    fn deferred_panic_uses_fallback_state() {
        let flow: AsyncFlow<i32, i32> = AsyncFlow::deferred(11, || async { panic!("raw") });
        let got = block_on(flow.run());
        assert_eq!(*got.state(), 11);
        assert_eq!(got.error_info().unwrap().kind(), ErrorKind::StepFault);
    }

    #[test]
    fn gather_empty() {
        let got = block_on(AsyncFlow::<i32, i32>::gather(vec![], None).run());
        let e = got.error_info().unwrap();
        assert_eq!(e.kind(), ErrorKind::EmptyGather);
        assert_eq!(e.message(), "No flows provided");
    }

    #[test]
    fn gather_default_and_custom_merge() {
        let flows = || {
            vec![
                AsyncFlow::start_with(1, 'a'),
                AsyncFlow::start_with(2, 'b'),
                AsyncFlow::start_with(3, 'c'),
            ]
        };
        let got = block_on(AsyncFlow::gather(flows(), None).run());
        assert_eq!(got, Flow::success(3, vec!['a', 'b', 'c']));
        let sum = MergeStrategy::new(|states: Vec<i32>| states.into_iter().sum());
        let got = block_on(AsyncFlow::gather(flows(), Some(sum)).run());
        assert_eq!(got, Flow::success(6, vec!['a', 'b', 'c']));
    }

    #[tokio::test]
    async fn gather_overlaps_sleeps() {
        let sleeper = |d: u64| {
            AsyncFlow::start_with(0u64, d).then(|s, d| async move {
                tokio::time::sleep(Duration::from_millis(d)).await;
                Flow::success(s, d)
            })
        };
        let started = std::time::Instant::now();
        let got = AsyncFlow::gather(vec![sleeper(60), sleeper(60), sleeper(60)], None)
            .run()
            .await;
        assert!(got.is_successful());
        assert!(started.elapsed() < Duration::from_millis(150));
    }

    #[test]
    fn run_all_keeps_every_failure() {
        let flows: Vec<AsyncFlow<i32, i32>> = vec![
            AsyncFlow::lift(Flow::failure(1, ErrorInfo::other("one"))),
            AsyncFlow::start_with(2, 2),
            AsyncFlow::lift(Flow::failure(3, ErrorInfo::other("three"))),
        ];
        let all = block_on(AsyncFlow::run_all(&flows));
        assert_eq!(all.iter().filter(|f| !f.is_successful()).count(), 2);
        let gathered = block_on(AsyncFlow::gather(flows, None).run());
        assert_eq!(gathered, Flow::failure(1, ErrorInfo::other("one")));
    }
}
