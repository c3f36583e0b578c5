/* tslint:disable */
/* eslint-disable */

export class PicardRun {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Row-major samples, `x1` slowest.
     */
    initial(): Float64Array;
    last(): Float64Array;
    constructor(alpha0: number, n: number, t0: number);
    summary(): string;
    readonly n: number;
}

/**
 * JSON `{r, spectral, plane, single}`.
 */
export function oseenProfile(alpha0: number, t: number, n: number): string;

/**
 * JSON `{admissible, violations}`; pass `Infinity` for infinite exponents.
 */
export function strichartzCheck(q: number, r: number, qt: number, s: number, k: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_picardrun_free: (a: number, b: number) => void;
    readonly oseenProfile: (a: number, b: number, c: number) => [number, number, number, number];
    readonly picardrun_initial: (a: number) => [number, number];
    readonly picardrun_last: (a: number) => [number, number];
    readonly picardrun_n: (a: number) => number;
    readonly picardrun_new: (a: number, b: number, c: number) => [number, number, number];
    readonly picardrun_summary: (a: number) => [number, number];
    readonly strichartzCheck: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
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
