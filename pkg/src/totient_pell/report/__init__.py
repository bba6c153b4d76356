"""报告层 - JSON 报告模型与文本渲染"""
