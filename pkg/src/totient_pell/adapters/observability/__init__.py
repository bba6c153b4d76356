"""可观测性适配器"""
