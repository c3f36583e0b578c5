/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_picardrun_free: (a: number, b: number) => void;
export const oseenProfile: (a: number, b: number, c: number) => [number, number, number, number];
export const picardrun_initial: (a: number) => [number, number];
export const picardrun_last: (a: number) => [number, number];
export const picardrun_n: (a: number) => number;
export const picardrun_new: (a: number, b: number, c: number) => [number, number, number];
export const picardrun_summary: (a: number) => [number, number];
export const strichartzCheck: (a: number, b: number, c: number, d: number, e: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
