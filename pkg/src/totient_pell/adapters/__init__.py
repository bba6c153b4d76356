"""适配器层 - 并行执行与可观测性"""
