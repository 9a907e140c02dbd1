/* tslint:disable */
/* eslint-disable */

/**
 * Parses and lints a case and runs the completeness rules.
 */
export function check_case(src: string): string;

/**
 * Computes a metric (`demographic_parity`, `disparate_impact`,
 * `faithfulness` or `monotonicity`) on CSV text. Empty group names fall
 * back to the defaults.
 */
export function compute_metric(kind: string, csv: string, group_a: string, group_b: string): string;

/**
 * Propagates the goal graph with `overrides` (a JSON object of leaf id to
 * satisfaction) and judges the mitigation claim.
 */
export function evaluate_goals(src: string, overrides: string): string;

/**
 * The bundled example case in `.elens` form.
 */
export function example_case(): string;

/**
 * Leaves of the case's goal graph with their current satisfaction.
 */
export function goal_leaves(src: string): string;

/**
 * Hop-by-hop trace from an element, back to losses or forward to evidence.
 */
export function trace(src: string, id: string, forward: boolean): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly check_case: (a: number, b: number) => [number, number];
    readonly compute_metric: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number];
    readonly evaluate_goals: (a: number, b: number, c: number, d: number) => [number, number];
    readonly example_case: () => [number, number];
    readonly goal_leaves: (a: number, b: number) => [number, number];
    readonly trace: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
